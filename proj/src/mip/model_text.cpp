#include "rideshare/mip/model_text.h"

#include <charconv>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>

namespace rideshare::mip {

namespace {

std::string format_number(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return {buf, res.ptr};
}

double parse_number(const std::string& token, int line) {
  if (token == "inf" || token == "+inf") return kInfinity;
  if (token == "-inf") return -kInfinity;
  double v = 0.0;
  const auto res = std::from_chars(token.data(), token.data() + token.size(), v);
  if (res.ec != std::errc() || res.ptr != token.data() + token.size()) {
    throw ModelError("line " + std::to_string(line) + ": bad number '" + token + "'");
  }
  return v;
}

int parse_int(const std::string& token, int line) {
  int v = 0;
  const auto res = std::from_chars(token.data(), token.data() + token.size(), v);
  if (res.ec != std::errc() || res.ptr != token.data() + token.size()) {
    throw ModelError("line " + std::to_string(line) + ": bad integer '" + token + "'");
  }
  return v;
}

const char* sense_name(Sense s) {
  switch (s) {
    case Sense::less_equal: return "le";
    case Sense::equal: return "eq";
    case Sense::greater_equal: return "ge";
  }
  return "le";
}

}  // namespace

void write_model(std::ostream& out, const LinearModel& model) {
  for (int j = 0; j < model.num_variables(); ++j) {
    const auto& v = model.variable(j);
    out << "var " << j << ' ' << format_number(v.lower) << ' ' << format_number(v.upper)
        << ' ' << (v.integer ? "int" : "cont") << ' ' << format_number(v.objective) << '\n';
  }
  for (const auto& c : model.constraints()) {
    out << "row " << sense_name(c.sense) << ' ' << format_number(c.rhs);
    for (const auto& t : c.terms) out << ' ' << t.var << ':' << format_number(t.coef);
    out << '\n';
  }
}

std::string model_to_string(const LinearModel& model) {
  std::ostringstream out;
  write_model(out, model);
  return out.str();
}

LinearModel read_model(std::istream& in) {
  LinearModel model;
  std::string text;
  int line = 0;
  while (std::getline(in, text)) {
    ++line;
    std::istringstream fields(text);
    std::string kind;
    if (!(fields >> kind) || kind[0] == '#') continue;
    if (kind == "var") {
      std::string id, lb, ub, type, obj;
      if (!(fields >> id >> lb >> ub >> type >> obj)) {
        throw ModelError("line " + std::to_string(line) + ": incomplete var record");
      }
      if (parse_int(id, line) != model.num_variables()) {
        throw ModelError("line " + std::to_string(line) + ": variable ids must be consecutive");
      }
      if (type != "int" && type != "cont") {
        throw ModelError("line " + std::to_string(line) + ": type must be int or cont");
      }
      model.add_variable(parse_number(lb, line), parse_number(ub, line),
                         parse_number(obj, line), type == "int");
    } else if (kind == "row") {
      std::string sense, rhs;
      if (!(fields >> sense >> rhs)) {
        throw ModelError("line " + std::to_string(line) + ": incomplete row record");
      }
      Sense s;
      if (sense == "le") {
        s = Sense::less_equal;
      } else if (sense == "eq") {
        s = Sense::equal;
      } else if (sense == "ge") {
        s = Sense::greater_equal;
      } else {
        throw ModelError("line " + std::to_string(line) + ": unknown sense '" + sense + "'");
      }
      std::vector<Term> terms;
      std::string term;
      while (fields >> term) {
        const auto colon = term.find(':');
        if (colon == std::string::npos) {
          throw ModelError("line " + std::to_string(line) + ": bad term '" + term + "'");
        }
        terms.push_back({parse_int(term.substr(0, colon), line),
                         parse_number(term.substr(colon + 1), line)});
      }
      model.add_constraint(std::move(terms), s, parse_number(rhs, line));
    } else {
      throw ModelError("line " + std::to_string(line) + ": unknown record '" + kind + "'");
    }
  }
  model.seal();
  return model;
}

}  // namespace rideshare::mip
