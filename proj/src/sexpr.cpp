#include "ct/sexpr.hpp"

#include <cctype>
#include <fstream>
#include <sstream>

#include "ct/rational.hpp"

namespace ct {

namespace {

struct Cursor {
  std::string_view s;
  size_t i = 0;
  int line = 1, col = 1;

  bool done() const { return i >= s.size(); }
  char peek() const { return s[i]; }
  char next() {
    char c = s[i++];
    if (c == '\n') {
      line++;
      col = 1;
    } else {
      col++;
    }
    return c;
  }
  void skip_ws() {
    while (!done()) {
      char c = peek();
      if (c == ';') {
        while (!done() && peek() != '\n') next();
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        next();
      } else {
        break;
      }
    }
  }
};

SNode parse_node(Cursor& c) {
  c.skip_ws();
  if (c.done()) fail(Errc::SyntaxError, "unexpected end of input");
  SNode n;
  n.line = c.line;
  n.col = c.col;
  if (c.peek() == '(') {
    c.next();
    n.is_list = true;
    while (true) {
      c.skip_ws();
      if (c.done()) fail(Errc::SyntaxError, "unclosed '(' at " + n.where());
      if (c.peek() == ')') {
        c.next();
        break;
      }
      n.items.push_back(parse_node(c));
    }
    return n;
  }
  if (c.peek() == ')') fail(Errc::SyntaxError, "unexpected ')' at line " + std::to_string(c.line));
  while (!c.done()) {
    char ch = c.peek();
    if (ch == '(' || ch == ')' || ch == ';' || std::isspace(static_cast<unsigned char>(ch))) break;
    n.text.push_back(c.next());
  }
  return n;
}

}  // namespace

std::vector<SNode> parse_sexprs(std::string_view text) {
  Cursor c{text};
  std::vector<SNode> out;
  while (true) {
    c.skip_ws();
    if (c.done()) break;
    out.push_back(parse_node(c));
  }
  return out;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(Errc::UsageError, "cannot open file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string rational_str(const Rational& r) {
  BigInt num = boost::multiprecision::numerator(r);
  BigInt den = boost::multiprecision::denominator(r);
  if (den == 1) return num.str();
  return num.str() + "/" + den.str();
}

bool looks_like_rational(const std::string& t) {
  if (t.empty()) return false;
  size_t i = (t[0] == '-') ? 1 : 0;
  if (i >= t.size()) return false;
  bool saw_digit = false, saw_slash = false;
  for (; i < t.size(); ++i) {
    if (std::isdigit(static_cast<unsigned char>(t[i]))) {
      saw_digit = true;
    } else if (t[i] == '/' && !saw_slash && saw_digit) {
      saw_slash = true;
      saw_digit = false;
    } else {
      return false;
    }
  }
  return saw_digit;
}

Rational parse_rational(const std::string& text) {
  if (!looks_like_rational(text)) fail(Errc::SyntaxError, "not a rational literal: '" + text + "'");
  auto slash = text.find('/');
  if (slash == std::string::npos) return Rational(BigInt(text));
  BigInt num(text.substr(0, slash));
  BigInt den(text.substr(slash + 1));
  if (den == 0) fail(Errc::SyntaxError, "zero denominator: '" + text + "'");
  return Rational(num, den);
}

const char* errc_name(Errc c) {
  switch (c) {
    case Errc::UnknownPredicate: return "UnknownPredicate";
    case Errc::UnknownDomain: return "UnknownDomain";
    case Errc::UnboundVariable: return "UnboundVariable";
    case Errc::ArityMismatch: return "ArityMismatch";
    case Errc::NonInjectiveRename: return "NonInjectiveRename";
    case Errc::BudgetExceeded: return "BudgetExceeded";
    case Errc::SyntaxError: return "SyntaxError";
    case Errc::DuplicateCdVariable: return "DuplicateCdVariable";
    case Errc::UniverseMismatch: return "UniverseMismatch";
    case Errc::AtomOutsideUniverse: return "AtomOutsideUniverse";
    case Errc::ShapeMismatch: return "ShapeMismatch";
    case Errc::PreconditionViolated: return "PreconditionViolated";
    case Errc::CapabilityMissing: return "CapabilityMissing";
    case Errc::InternalInconsistency: return "InternalInconsistency";
    case Errc::InvalidStrategy: return "InvalidStrategy";
    case Errc::NominalsNotSupported: return "NominalsNotSupported";
    case Errc::UnknownFeature: return "UnknownFeature";
    case Errc::UnknownIndividual: return "UnknownIndividual";
    case Errc::ResourceExceeded: return "ResourceExceeded";
    case Errc::UsageError: return "UsageError";
  }
  return "Error";
}

}  // namespace ct
