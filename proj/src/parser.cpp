#include "attrq/parser.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <set>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include "attrq/errors.hpp"

namespace attrq {
namespace {

enum class Tok { kIdent, kInt, kEq, kLe, kGe, kNot, kAnd, kOr, kLParen, kRParen, kStar, kColon, kEnd };

struct Token {
  Tok kind;
  std::string text;
};

std::vector<Token> lex(std::string_view s, std::size_t line) {
  std::vector<Token> out;
  std::size_t i = 0;
  while (i < s.size()) {
    const char c = s[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      ++i;
    } else if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t j = i;
      while (j < s.size() && (std::isalnum(static_cast<unsigned char>(s[j])) || s[j] == '_')) ++j;
      out.push_back({Tok::kIdent, std::string(s.substr(i, j - i))});
      i = j;
    } else if (std::isdigit(static_cast<unsigned char>(c))) {
      std::size_t j = i;
      while (j < s.size() && std::isdigit(static_cast<unsigned char>(s[j]))) ++j;
      out.push_back({Tok::kInt, std::string(s.substr(i, j - i))});
      i = j;
    } else if (c == '<' || c == '>') {
      if (i + 1 >= s.size() || s[i + 1] != '=') throw ParseError(line, std::string("expected '=' after '") + c + "'");
      out.push_back({c == '<' ? Tok::kLe : Tok::kGe, std::string(s.substr(i, 2))});
      i += 2;
    } else {
      Tok kind;
      switch (c) {
        case '=': kind = Tok::kEq; break;
        case '!': kind = Tok::kNot; break;
        case '&': kind = Tok::kAnd; break;
        case '|': kind = Tok::kOr; break;
        case '(': kind = Tok::kLParen; break;
        case ')': kind = Tok::kRParen; break;
        case '*': kind = Tok::kStar; break;
        case ':': kind = Tok::kColon; break;
        default: throw ParseError(line, std::string("unexpected character '") + c + "'");
      }
      out.push_back({kind, std::string(1, c)});
      ++i;
    }
  }
  out.push_back({Tok::kEnd, ""});
  return out;
}

struct Declared {
  std::size_t index;
  Level max_level;
};

class LineParser {
 public:
  LineParser(std::vector<Token> tokens, std::size_t line,
             const std::unordered_map<std::string, Declared>& names)
      : tokens_(std::move(tokens)), line_(line), names_(names) {}

  const Token& peek() const { return tokens_[pos_]; }
  Token next() { return tokens_[pos_++]; }
  bool at_end() const { return peek().kind == Tok::kEnd; }

  [[noreturn]] void fail(const std::string& what) const { throw ParseError(line_, what); }

  Token expect(Tok kind, const char* what) {
    if (peek().kind != kind) fail(std::string("expected ") + what + (at_end() ? " at end of line" : " near '" + peek().text + "'"));
    return next();
  }

  const Declared& component(const std::string& name) const {
    auto it = names_.find(name);
    if (it == names_.end()) fail("unknown component '" + name + "'");
    return it->second;
  }

  Level level_literal(const std::string& text, const Declared& comp, const std::string& name) const {
    unsigned long v = 0;
    try {
      v = std::stoul(text);
    } catch (const std::exception&) {
      fail("invalid level '" + text + "'");
    }
    if (v > comp.max_level) fail("level out of range for '" + name + "': " + text);
    return static_cast<Level>(v);
  }

  // expr := term ('|' term)* ; term := factor ('&' factor)* ; factor := '!' factor | '(' expr ')' | atom
  BoolExpr expr() {
    BoolExpr lhs = term();
    while (peek().kind == Tok::kOr) {
      next();
      lhs = BoolExpr::disj(std::move(lhs), term());
    }
    return lhs;
  }

 private:
  BoolExpr term() {
    BoolExpr lhs = factor();
    while (peek().kind == Tok::kAnd) {
      next();
      lhs = BoolExpr::conj(std::move(lhs), factor());
    }
    return lhs;
  }

  BoolExpr factor() {
    if (peek().kind == Tok::kNot) {
      next();
      return BoolExpr::negate(factor());
    }
    if (peek().kind == Tok::kLParen) {
      next();
      BoolExpr e = expr();
      expect(Tok::kRParen, "')'");
      return e;
    }
    const std::string name = expect(Tok::kIdent, "component name").text;
    const Declared& comp = component(name);
    Comparator cmp;
    switch (peek().kind) {
      case Tok::kEq: cmp = Comparator::kEq; break;
      case Tok::kLe: cmp = Comparator::kLe; break;
      case Tok::kGe: cmp = Comparator::kGe; break;
      default: fail("expected comparator after '" + name + "'");
    }
    next();
    const std::string lit = expect(Tok::kInt, "level").text;
    return BoolExpr::atom(comp.index, cmp, level_literal(lit, comp, name));
  }

  std::vector<Token> tokens_;
  std::size_t pos_ = 0;
  std::size_t line_;
  const std::unordered_map<std::string, Declared>& names_;
};

bool valid_identifier(std::string_view s) {
  if (s.empty() || !(std::isalpha(static_cast<unsigned char>(s[0])) || s[0] == '_')) return false;
  return std::all_of(s.begin(), s.end(), [](char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; });
}

struct RawLine {
  std::size_t number;
  std::string keyword;
  std::string rest;
};

}  // namespace

bool OracleSpec::matches(std::span<const Level> state) const {
  return std::any_of(patterns.begin(), patterns.end(), [&](const OraclePattern& p) {
    for (std::size_t i = 0; i < p.size(); ++i)
      if (p[i] && *p[i] != state[i]) return false;
    return true;
  });
}

bool ModelDocument::operator==(const ModelDocument& other) const {
  return model == other.model && initial == other.initial && oracles == other.oracles;
}

ModelDocument parse_model(std::string_view text, std::string name) {
  std::vector<RawLine> lines;
  {
    std::size_t number = 0;
    std::size_t start = 0;
    while (start <= text.size()) {
      std::size_t end = text.find('\n', start);
      if (end == std::string_view::npos) end = text.size();
      ++number;
      std::string_view line = text.substr(start, end - start);
      if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
      std::size_t b = 0;
      while (b < line.size() && std::isspace(static_cast<unsigned char>(line[b]))) ++b;
      std::size_t k = b;
      while (k < line.size() && !std::isspace(static_cast<unsigned char>(line[k]))) ++k;
      if (k > b) lines.push_back({number, std::string(line.substr(b, k - b)), std::string(line.substr(k))});
      start = end + 1;
    }
  }

  // Pass 1: declarations.
  std::vector<ComponentDef> components;
  std::vector<bool> inputs;
  std::unordered_map<std::string, Declared> names;
  for (const auto& l : lines) {
    if (l.keyword != "NODE" && l.keyword != "INPUT") continue;
    std::istringstream in(l.rest);
    std::string comp;
    std::string max_text;
    std::string extra;
    if (!(in >> comp >> max_text) || (in >> extra)) throw ParseError(l.number, "expected '" + l.keyword + " <name> <max_level>'");
    if (!valid_identifier(comp)) throw ParseError(l.number, "invalid component name '" + comp + "'");
    if (names.count(comp)) throw ParseError(l.number, "duplicate component '" + comp + "'");
    if (!std::all_of(max_text.begin(), max_text.end(), [](char c) { return std::isdigit(static_cast<unsigned char>(c)); }))
      throw ParseError(l.number, "invalid max level '" + max_text + "'");
    const unsigned long max_level = max_text.size() > 4 ? 100000 : std::stoul(max_text);
    if (max_level < 1 || max_level > 255) throw ParseError(l.number, "max level of '" + comp + "' must be in 1..255");
    names.emplace(comp, Declared{components.size(), static_cast<Level>(max_level)});
    components.push_back(ComponentDef{comp, static_cast<Level>(max_level), {}});
    inputs.push_back(l.keyword == "INPUT");
  }
  if (components.empty()) throw ParseError(lines.empty() ? 1 : lines.back().number, "model declares no components");

  // Pass 2: rules, initial conditions, oracles.
  InitialSpec initial;
  std::set<std::size_t> sampled;
  std::vector<OracleSpec> oracles;
  for (const auto& l : lines) {
    if (l.keyword == "NODE" || l.keyword == "INPUT") continue;
    LineParser p(lex(l.rest, l.number), l.number, names);
    if (l.keyword == "TARGET") {
      const std::string comp = p.expect(Tok::kIdent, "component name").text;
      const Declared& d = p.component(comp);
      if (inputs[d.index]) p.fail("input component '" + comp + "' cannot have TARGET rules");
      const Level target = p.level_literal(p.expect(Tok::kInt, "target level").text, d, comp);
      p.expect(Tok::kColon, "':'");
      BoolExpr cond = p.expr();
      if (!p.at_end()) p.fail("unexpected '" + p.peek().text + "' after expression");
      components[d.index].rules.push_back(TargetRule{target, std::move(cond)});
    } else if (l.keyword == "INIT") {
      if (p.peek().kind == Tok::kStar) {
        p.next();
        const Token t = p.expect(Tok::kIdent, "SAMPLE");
        if (t.text != "SAMPLE" || !p.at_end()) p.fail("expected 'INIT * SAMPLE'");
        for (std::size_t i = 0; i < components.size(); ++i) {
          if (initial.fixed.count(i)) p.fail("component '" + components[i].name + "' is both fixed and sampled");
          sampled.insert(i);
        }
        continue;
      }
      if (p.at_end()) p.fail("empty INIT line");
      while (!p.at_end()) {
        const std::string comp = p.expect(Tok::kIdent, "component name").text;
        const Declared& d = p.component(comp);
        p.expect(Tok::kEq, "'='");
        if (initial.fixed.count(d.index) || sampled.count(d.index)) p.fail("component '" + comp + "' initialised twice");
        if (p.peek().kind == Tok::kIdent && p.peek().text == "SAMPLE") {
          p.next();
          sampled.insert(d.index);
        } else {
          initial.fixed[d.index] = p.level_literal(p.expect(Tok::kInt, "level or SAMPLE").text, d, comp);
        }
      }
    } else if (l.keyword == "ORACLE") {
      const std::string id = p.expect(Tok::kIdent, "oracle id").text;
      p.expect(Tok::kColon, "':'");
      OraclePattern pattern(components.size());
      std::vector<bool> seen(components.size(), false);
      while (!p.at_end()) {
        const std::string comp = p.expect(Tok::kIdent, "component name").text;
        const Declared& d = p.component(comp);
        if (seen[d.index]) p.fail("component '" + comp + "' repeated in oracle pattern");
        seen[d.index] = true;
        p.expect(Tok::kEq, "'='");
        if (p.peek().kind == Tok::kStar) {
          p.next();
        } else {
          pattern[d.index] = p.level_literal(p.expect(Tok::kInt, "level or '*'").text, d, comp);
        }
      }
      auto it = std::find_if(oracles.begin(), oracles.end(), [&](const OracleSpec& o) { return o.id == id; });
      if (it == oracles.end()) {
        oracles.push_back(OracleSpec{id, {std::move(pattern)}});
      } else {
        it->patterns.push_back(std::move(pattern));
      }
    } else {
      throw ParseError(l.number, "unknown directive '" + l.keyword + "'");
    }
  }
  initial.sampled.assign(sampled.begin(), sampled.end());

  return ModelDocument{std::move(name), LogicalModel(std::move(components), std::move(inputs)), std::move(initial),
                       std::move(oracles)};
}

ModelDocument load_model(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ModelError("cannot open model file '" + path.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_model(buf.str(), path.stem().string());
}

namespace {

int precedence(BoolExpr::Kind k) {
  switch (k) {
    case BoolExpr::Kind::kOr: return 0;
    case BoolExpr::Kind::kAnd: return 1;
    default: return 2;
  }
}

void print_node(const LogicalModel& model, const BoolExpr& e, std::size_t index, std::string& out) {
  const auto& n = e.node(index);
  auto child = [&](std::size_t c, bool paren) {
    if (paren) out += '(';
    print_node(model, e, c, out);
    if (paren) out += ')';
  };
  switch (n.kind) {
    case BoolExpr::Kind::kAtom: {
      out += model.component(n.component).name;
      out += n.comparator == Comparator::kEq ? "=" : n.comparator == Comparator::kLe ? "<=" : ">=";
      out += std::to_string(n.level);
      break;
    }
    case BoolExpr::Kind::kNot:
      out += '!';
      child(n.lhs, precedence(e.node(n.lhs).kind) < 2);
      break;
    case BoolExpr::Kind::kAnd:
    case BoolExpr::Kind::kOr: {
      const int prec = precedence(n.kind);
      child(n.lhs, precedence(e.node(n.lhs).kind) < prec);
      out += n.kind == BoolExpr::Kind::kAnd ? " & " : " | ";
      child(n.rhs, precedence(e.node(n.rhs).kind) <= prec);
      break;
    }
  }
}

}  // namespace

std::string format_expr(const LogicalModel& model, const BoolExpr& expr) {
  std::string out;
  print_node(model, expr, expr.root(), out);
  return out;
}

std::string print_model(const ModelDocument& doc) {
  const LogicalModel& m = doc.model;
  std::ostringstream out;
  for (std::size_t i = 0; i < m.size(); ++i)
    out << (m.is_input(i) ? "INPUT " : "NODE ") << m.component(i).name << ' ' << int(m.component(i).max_level) << '\n';
  for (std::size_t i = 0; i < m.size(); ++i)
    for (const auto& rule : m.component(i).rules)
      out << "TARGET " << m.component(i).name << ' ' << int(rule.target) << " : " << format_expr(m, rule.condition) << '\n';

  const auto& init = doc.initial;
  if (init.sampled.size() == m.size()) {
    out << "INIT * SAMPLE\n";
  } else if (!init.fixed.empty() || !init.sampled.empty()) {
    out << "INIT";
    for (std::size_t i = 0; i < m.size(); ++i) {
      if (auto it = init.fixed.find(i); it != init.fixed.end()) {
        out << ' ' << m.component(i).name << '=' << int(it->second);
      } else if (std::binary_search(init.sampled.begin(), init.sampled.end(), i)) {
        out << ' ' << m.component(i).name << "=SAMPLE";
      }
    }
    out << '\n';
  }

  for (const auto& oracle : doc.oracles) {
    for (const auto& pattern : oracle.patterns) {
      out << "ORACLE " << oracle.id << " :";
      bool any = false;
      for (std::size_t i = 0; i < m.size(); ++i) {
        if (!pattern[i]) continue;
        out << ' ' << m.component(i).name << '=' << int(*pattern[i]);
        any = true;
      }
      if (!any) out << ' ' << m.component(0).name << "=*";
      out << '\n';
    }
  }
  return out.str();
}

State initial_state(const ModelDocument& doc) {
  State s(doc.model.size(), 0);
  for (const auto& [i, level] : doc.initial.fixed) s[i] = level;
  return s;
}

SparseDistribution initial_distribution(const ModelDocument& doc, std::size_t max_support) {
  const LogicalModel& m = doc.model;
  std::size_t support = 1;
  for (const std::size_t i : doc.initial.sampled) {
    const std::size_t radix = std::size_t{m.component(i).max_level} + 1;
    if (support > max_support / radix) throw CapacityError("initial distribution support exceeds " + std::to_string(max_support) + " states");
    support *= radix;
  }
  SparseDistribution mu0;
  mu0.reserve(support);
  const double mass = 1.0 / static_cast<double>(support);
  State s = initial_state(doc);
  const auto& sampled = doc.initial.sampled;
  for (std::size_t k = 0; k < support; ++k) {
    std::size_t rest = k;
    for (const std::size_t i : sampled) {
      const std::size_t radix = std::size_t{m.component(i).max_level} + 1;
      s[i] = static_cast<Level>(rest % radix);
      rest /= radix;
    }
    mu0[m.encode(s)] += mass;
  }
  return mu0;
}

std::optional<std::size_t> match_oracle(std::span<const OracleSpec> oracles, std::span<const Level> state) {
  for (std::size_t i = 0; i < oracles.size(); ++i)
    if (oracles[i].matches(state)) return i;
  return std::nullopt;
}

std::optional<std::size_t> oracle_state_count(const LogicalModel& model, const OracleSpec& oracle, std::size_t limit) {
  std::size_t total = 0;
  for (const auto& p : oracle.patterns) {
    std::size_t n = 1;
    for (std::size_t i = 0; i < p.size(); ++i) {
      if (p[i]) continue;
      const std::size_t radix = std::size_t{model.component(i).max_level} + 1;
      if (n > limit / radix) return std::nullopt;
      n *= radix;
    }
    total += n;
    if (total > limit) return std::nullopt;
  }
  if (oracle.patterns.size() == 1) return total;

  std::unordered_set<StateCode> states;
  for (const auto& p : oracle.patterns) {
    std::vector<std::size_t> free;
    State s(model.size(), 0);
    for (std::size_t i = 0; i < p.size(); ++i) {
      if (p[i]) {
        s[i] = *p[i];
      } else {
        free.push_back(i);
      }
    }
    // odometer over the wildcard coordinates
    while (true) {
      states.insert(model.encode(s));
      std::size_t j = 0;
      for (; j < free.size(); ++j) {
        if (s[free[j]] < model.component(free[j]).max_level) {
          ++s[free[j]];
          break;
        }
        s[free[j]] = 0;
      }
      if (j == free.size()) break;
    }
  }
  return states.size();
}

}  // namespace attrq
