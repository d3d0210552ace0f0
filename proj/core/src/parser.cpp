#include <horn/parser.hpp>

#include <json.hpp>

#include <algorithm>
#include <cctype>
#include <sstream>

namespace horn {

namespace {

bool is_ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) != 0; }
bool is_ident_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) != 0 || c == '_';
}
bool is_upper(char c) { return std::isupper(static_cast<unsigned char>(c)) != 0; }

// Names of the shape p<digits> denote flat invented terms in rendered output,
// so user constants may not take that shape: a solution mentioning such a
// constant would read back as a different term.
bool is_reserved_const(const std::string& name) {
  if (name.size() < 2 || name[0] != 'p') return false;
  return std::all_of(name.begin() + 1, name.end(), [](char c) {
    return std::isdigit(static_cast<unsigned char>(c)) != 0;
  });
}

// Cursor over one statement line with position-tagged errors.
class LineCursor {
 public:
  LineCursor(const std::string& text, int line) : text_(text), line_(line) {}

  [[noreturn]] void fail(const std::string& what) const {
    throw HornError(ErrorCode::SyntaxError,
                    "line " + std::to_string(line_) + ", column " +
                        std::to_string(pos_ + 1) + ": " + what);
  }

  void skip_ws() {
    while (pos_ < text_.size() &&
           std::isspace(static_cast<unsigned char>(text_[pos_])))
      ++pos_;
  }

  bool at_end() {
    skip_ws();
    return pos_ >= text_.size();
  }

  char peek() {
    skip_ws();
    return pos_ < text_.size() ? text_[pos_] : '\0';
  }

  bool try_consume(char c) {
    skip_ws();
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  bool try_consume(const std::string& s) {
    skip_ws();
    if (text_.compare(pos_, s.size(), s) == 0) {
      pos_ += s.size();
      return true;
    }
    return false;
  }

  void expect(char c, const std::string& what) {
    if (!try_consume(c)) fail("expected '" + std::string(1, c) + "' " + what);
  }

  void expect(const std::string& s, const std::string& what) {
    if (!try_consume(s)) fail("expected '" + s + "' " + what);
  }

  std::string ident() {
    skip_ws();
    if (pos_ >= text_.size() || !is_ident_start(text_[pos_]))
      fail("expected an identifier");
    std::size_t start = pos_;
    while (pos_ < text_.size() && is_ident_char(text_[pos_])) ++pos_;
    return text_.substr(start, pos_ - start);
  }

  long long integer() {
    skip_ws();
    std::size_t start = pos_;
    if (pos_ < text_.size() && (text_[pos_] == '-' || text_[pos_] == '+')) ++pos_;
    while (pos_ < text_.size() &&
           std::isdigit(static_cast<unsigned char>(text_[pos_])))
      ++pos_;
    if (pos_ == start) fail("expected a number");
    return std::stoll(text_.substr(start, pos_ - start));
  }

  // Integer, fraction n/d, or decimal like 1.2 — returned as a rational.
  Rational rational() {
    long long n = integer();
    skip_ws();
    if (pos_ < text_.size() && text_[pos_] == '/') {
      ++pos_;
      long long d = integer();
      return Rational(n, d);
    }
    if (pos_ < text_.size() && text_[pos_] == '.') {
      ++pos_;
      std::size_t start = pos_;
      while (pos_ < text_.size() &&
             std::isdigit(static_cast<unsigned char>(text_[pos_])))
        ++pos_;
      if (pos_ == start) fail("expected digits after '.'");
      std::string frac = text_.substr(start, pos_ - start);
      long long den = 1;
      for (std::size_t i = 0; i < frac.size(); ++i) den *= 10;
      long long num = n * den + (n < 0 ? -1 : 1) * std::stoll(frac);
      return Rational(num, den);
    }
    return Rational(n, 1);
  }

  int line() const { return line_; }

 private:
  const std::string& text_;
  int line_;
  std::size_t pos_ = 0;
};

// An argument token of a statement atom: variable or constant by case.
AtomPattern parse_pattern(LineCursor& cur) {
  AtomPattern pat;
  pat.predicate = cur.ident();
  if (is_upper(pat.predicate[0])) cur.fail("predicate must start lowercase");
  if (cur.try_consume('(')) {
    if (!cur.try_consume(')')) {
      do {
        std::string tok = cur.ident();
        if (!is_upper(tok[0]) && is_reserved_const(tok))
          cur.fail("constant name '" + tok +
                   "' is reserved for invented terms");
        pat.args.push_back(PatTerm{is_upper(tok[0]), tok});
      } while (cur.try_consume(','));
      cur.expect(')', "to close the argument list");
    }
  }
  return pat;
}

struct RawStatement {
  enum class Kind { Axiom, Goal, SortName, Cost, Nogood, Unique };
  Kind kind;
  int line = 0;
  // Axiom:
  std::string axiom_id;  // empty when auto-assigned
  std::vector<Rational> weights;
  AtomPattern head;
  std::vector<AtomPattern> body;
  // Goal / Nogood:
  std::vector<AtomPattern> atoms;
  // SortName:
  std::vector<std::string> names;
  // Cost:
  AtomPattern cost_atom;
  long long cost_value = 0;
  // Unique:
  std::string unique_pred;
  int unique_keys = 0;
  int unique_values = 0;
};

RawStatement parse_statement(LineCursor& cur, const std::string& keyword) {
  RawStatement st;
  st.line = cur.line();
  if (keyword == "axiom") {
    st.kind = RawStatement::Kind::Axiom;
    if (cur.peek() != ':' && cur.peek() != '@') {
      st.axiom_id = cur.ident();
      if (is_upper(st.axiom_id[0])) cur.fail("axiom id must start lowercase");
    }
    if (cur.try_consume("@w=")) {
      do {
        st.weights.push_back(cur.rational());
      } while (cur.try_consume(','));
    }
    cur.expect(':', "after the axiom keyword");
    st.head = parse_pattern(cur);
    cur.expect("<-", "between head and body");
    do {
      st.body.push_back(parse_pattern(cur));
    } while (cur.try_consume(','));
  } else if (keyword == "goal" || keyword == "nogood") {
    st.kind = keyword == "goal" ? RawStatement::Kind::Goal
                                : RawStatement::Kind::Nogood;
    cur.expect(':', "after the keyword");
    do {
      st.atoms.push_back(parse_pattern(cur));
    } while (cur.try_consume(','));
  } else if (keyword == "sortname") {
    st.kind = RawStatement::Kind::SortName;
    cur.expect(':', "after the keyword");
    do {
      std::string name = cur.ident();
      if (is_upper(name[0])) cur.fail("sort names must start lowercase");
      if (is_reserved_const(name))
        cur.fail("constant name '" + name +
                 "' is reserved for invented terms");
      st.names.push_back(name);
    } while (cur.try_consume(','));
  } else if (keyword == "cost") {
    st.kind = RawStatement::Kind::Cost;
    cur.expect(':', "after the keyword");
    st.cost_atom = parse_pattern(cur);
    cur.expect('=', "before the cost value");
    st.cost_value = cur.integer();
  } else if (keyword == "unique") {
    st.kind = RawStatement::Kind::Unique;
    cur.expect(':', "after the keyword");
    st.unique_pred = cur.ident();
    if (is_upper(st.unique_pred[0])) cur.fail("predicate must start lowercase");
    cur.expect('(', "after the predicate");
    bool in_values = false;
    while (true) {
      cur.ident();  // placeholder name; only the position matters
      if (in_values)
        ++st.unique_values;
      else
        ++st.unique_keys;
      if (cur.try_consume(',')) continue;
      if (cur.try_consume(';')) {
        if (in_values) cur.fail("only one ';' separator is allowed");
        in_values = true;
        continue;
      }
      break;
    }
    cur.expect(')', "to close the declaration");
    if (!in_values) cur.fail("expected ';' separating key and value positions");
    if (st.unique_values == 0) cur.fail("expected at least one value position");
  } else {
    cur.fail("unknown statement keyword '" + keyword + "'");
  }
  cur.expect('.', "to end the statement");
  if (!cur.at_end()) cur.fail("unexpected trailing input");
  return st;
}

// Turn a ground statement pattern (goal/cost atoms) into an Atom, resolving
// variables through the goal-existential materialization map.
Atom ground_atom(const RawStatement& st, const AtomPattern& pat,
                 const std::map<std::string, Term>& materialized) {
  Atom atom;
  atom.predicate = pat.predicate;
  for (const PatTerm& p : pat.args) {
    if (!p.is_var) {
      atom.args.push_back(Term::make_const(p.name));
      continue;
    }
    auto it = materialized.find(p.name);
    if (it == materialized.end())
      throw HornError(ErrorCode::SemanticError,
                      "line " + std::to_string(st.line) + ": variable " +
                          p.name + " is not allowed here");
    atom.args.push_back(it->second);
  }
  return atom;
}

std::string render_weights(const std::vector<Rational>& weights) {
  std::string out = "@w=";
  for (std::size_t i = 0; i < weights.size(); ++i) {
    if (i) out += ",";
    out += std::to_string(weights[i].num);
    if (weights[i].den != 1) out += "/" + std::to_string(weights[i].den);
  }
  return out;
}

std::string render_pattern(const AtomPattern& pat) {
  if (pat.args.empty()) return pat.predicate;
  std::string out = pat.predicate + "(";
  for (std::size_t i = 0; i < pat.args.size(); ++i) {
    if (i) out += ",";
    out += pat.args[i].name;
  }
  return out + ")";
}

}  // namespace

AbductionInstance parse_instance(const std::string& text) {
  std::vector<RawStatement> statements;
  std::istringstream in(text);
  std::string raw_line;
  int line_no = 0;
  while (std::getline(in, raw_line)) {
    ++line_no;
    if (auto cut = raw_line.find('%'); cut != std::string::npos)
      raw_line.erase(cut);
    LineCursor cur(raw_line, line_no);
    if (cur.at_end()) continue;
    std::string keyword = cur.ident();
    statements.push_back(parse_statement(cur, keyword));
  }

  AbductionInstance instance;
  const RawStatement* goal_stmt = nullptr;

  // Sorts first: goal materialization must know them.
  for (const RawStatement& st : statements) {
    if (st.kind == RawStatement::Kind::SortName)
      instance.sort_names.insert(st.names.begin(), st.names.end());
  }

  // Axioms, assigning r<k> by file order when no id was given.
  int axiom_index = 0;
  std::set<std::string> axiom_ids;
  for (const RawStatement& st : statements) {
    if (st.kind != RawStatement::Kind::Axiom) continue;
    ++axiom_index;
    AxiomSchema ax;
    ax.id = st.axiom_id.empty() ? "r" + std::to_string(axiom_index) : st.axiom_id;
    ax.head = st.head;
    ax.body = st.body;
    ax.weights = st.weights;
    if (!axiom_ids.insert(ax.id).second)
      throw HornError(ErrorCode::SemanticError,
                      "line " + std::to_string(st.line) + ": duplicate axiom id " +
                          ax.id);
    try {
      ax.finalize();
    } catch (const HornError& e) {
      throw HornError(e.code(),
                      "line " + std::to_string(st.line) + ": " + e.what());
    }
    instance.axioms.push_back(std::move(ax));
  }

  // The goal: exactly one declaration; uppercase tokens become fresh
  // constants (the existentially quantified observations).
  std::map<std::string, Term> materialized;
  for (const RawStatement& st : statements) {
    if (st.kind != RawStatement::Kind::Goal) continue;
    if (goal_stmt)
      throw HornError(ErrorCode::SemanticError,
                      "line " + std::to_string(st.line) +
                          ": more than one goal declaration");
    goal_stmt = &st;

    std::set<std::string> used_constants;
    for (const AtomPattern& a : st.atoms)
      for (const PatTerm& p : a.args)
        if (!p.is_var) used_constants.insert(p.name);
    for (const AtomPattern& a : st.atoms) {
      for (const PatTerm& p : a.args) {
        if (!p.is_var || materialized.count(p.name)) continue;
        std::string name = p.name;
        name[0] = static_cast<char>(
            std::tolower(static_cast<unsigned char>(name[0])));
        while (used_constants.count(name)) name += "_";
        if (instance.sort_names.count(name))
          throw HornError(ErrorCode::SemanticError,
                          "line " + std::to_string(st.line) + ": sort name " +
                              name + " used as a goal existential");
        used_constants.insert(name);
        materialized[p.name] = Term::make_const(name);
      }
    }
    for (const AtomPattern& a : st.atoms)
      instance.goal.push_back(ground_atom(st, a, materialized));
  }
  if (!goal_stmt)
    throw HornError(ErrorCode::SemanticError, "missing goal declaration");
  {
    std::set<Atom> dedup(instance.goal.begin(), instance.goal.end());
    if (dedup.size() != instance.goal.size())
      throw HornError(ErrorCode::SemanticError, "duplicate goal atom");
  }

  // Remaining statements.
  for (const RawStatement& st : statements) {
    switch (st.kind) {
      case RawStatement::Kind::Cost: {
        Atom atom = ground_atom(st, st.cost_atom, materialized);
        if (std::find(instance.goal.begin(), instance.goal.end(), atom) ==
            instance.goal.end())
          throw HornError(ErrorCode::SemanticError,
                          "line " + std::to_string(st.line) +
                              ": cost declared for non-goal atom " +
                              render(atom));
        if (st.cost_value <= 0)
          throw HornError(ErrorCode::SemanticError,
                          "line " + std::to_string(st.line) +
                              ": cost must be positive");
        instance.initial_costs[atom] = st.cost_value;
        break;
      }
      case RawStatement::Kind::Nogood: {
        NogoodPattern ng;
        ng.atoms = st.atoms;
        instance.nogoods.push_back(std::move(ng));
        break;
      }
      case RawStatement::Kind::Unique: {
        UniqueSlot slot;
        slot.predicate = st.unique_pred;
        for (int i = 0; i < st.unique_keys; ++i) slot.key_positions.push_back(i);
        for (int i = 0; i < st.unique_values; ++i)
          slot.value_positions.push_back(st.unique_keys + i);
        instance.unique_slots.push_back(std::move(slot));
        break;
      }
      default:
        break;
    }
  }
  return instance;
}

std::string render_instance(const AbductionInstance& instance) {
  std::string out;
  if (!instance.sort_names.empty()) {
    out += "sortname: ";
    bool first = true;
    for (const std::string& s : instance.sort_names) {
      if (!first) out += ", ";
      out += s;
      first = false;
    }
    out += ".\n";
  }
  for (const AxiomSchema& ax : instance.axioms) {
    out += "axiom " + ax.id + " " + render_weights(ax.weights) + ": " +
           render_pattern(ax.head) + " <- ";
    for (std::size_t i = 0; i < ax.body.size(); ++i) {
      if (i) out += ", ";
      out += render_pattern(ax.body[i]);
    }
    out += ".\n";
  }
  out += "goal: ";
  for (std::size_t i = 0; i < instance.goal.size(); ++i) {
    if (i) out += ", ";
    out += render(instance.goal[i]);
  }
  out += ".\n";
  for (const auto& [atom, cost] : instance.initial_costs)
    out += "cost: " + render(atom) + " = " + std::to_string(cost) + ".\n";
  for (const NogoodPattern& ng : instance.nogoods) {
    out += "nogood: ";
    for (std::size_t i = 0; i < ng.atoms.size(); ++i) {
      if (i) out += ", ";
      out += render_pattern(ng.atoms[i]);
    }
    out += ".\n";
  }
  for (const UniqueSlot& slot : instance.unique_slots) {
    out += "unique: " + slot.predicate + "(";
    for (std::size_t i = 0; i < slot.key_positions.size(); ++i) {
      if (i) out += ",";
      out += "K" + std::to_string(i + 1);
    }
    out += "; ";
    for (std::size_t i = 0; i < slot.value_positions.size(); ++i) {
      if (i) out += ",";
      out += "V" + std::to_string(i + 1);
    }
    out += ").\n";
  }
  return out;
}

namespace {

// Recursive-descent reader for canonically rendered terms and atoms.
class TermCursor {
 public:
  explicit TermCursor(const std::string& text) : text_(text) {}

  [[noreturn]] void fail(const std::string& what) const {
    throw HornError(ErrorCode::SyntaxError,
                    "term '" + text_ + "', position " + std::to_string(pos_) +
                        ": " + what);
  }

  Term term() {
    std::string name = ident();
    if (name == "s" && peek() == '(') {
      ++pos_;
      std::string axiom_id = ident();
      expect(',');
      expect('"');
      std::string var = ident();
      expect('"');
      std::vector<Term> args;
      while (at(',')) {
        ++pos_;
        args.push_back(term());
      }
      expect(')');
      return Term::make_skolem(axiom_id, var, std::move(args));
    }
    if (name.size() > 1 && name[0] == 'p' &&
        std::all_of(name.begin() + 1, name.end(), [](char c) {
          return std::isdigit(static_cast<unsigned char>(c)) != 0;
        }))
      return Term::make_flat(std::stoi(name.substr(1)));
    return Term::make_const(name);
  }

  Atom atom() {
    Atom out;
    out.predicate = ident();
    if (at('(')) {
      ++pos_;
      if (!at(')')) {
        out.args.push_back(term());
        while (at(',')) {
          ++pos_;
          out.args.push_back(term());
        }
      }
      expect(')');
    }
    return out;
  }

  void finish() {
    if (pos_ != text_.size()) fail("unexpected trailing input");
  }

 private:
  char peek() const { return pos_ < text_.size() ? text_[pos_] : '\0'; }
  bool at(char c) const { return peek() == c; }
  void expect(char c) {
    if (!at(c)) fail(std::string("expected '") + c + "'");
    ++pos_;
  }
  std::string ident() {
    if (pos_ >= text_.size() || !is_ident_start(text_[pos_]))
      fail("expected an identifier");
    std::size_t start = pos_;
    while (pos_ < text_.size() && is_ident_char(text_[pos_])) ++pos_;
    return text_.substr(start, pos_ - start);
  }

  const std::string& text_;
  std::size_t pos_ = 0;
};

}  // namespace

Term parse_term(const std::string& text) {
  TermCursor cur(text);
  Term t = cur.term();
  cur.finish();
  return t;
}

Atom parse_atom(const std::string& text) {
  TermCursor cur(text);
  Atom a = cur.atom();
  cur.finish();
  return a;
}

std::string render_solution(const Solution& sol) {
  nlohmann::ordered_json j;
  j["objective"] = sol.objective;
  j["cost"] = sol.objective_value;
  j["abduced"] = nlohmann::json::array();
  for (const Atom& a : sol.abduced) j["abduced"].push_back(render(a));
  j["inferred"] = nlohmann::json::array();
  for (const auto& [atom, choice] : sol.inferred) {
    nlohmann::ordered_json entry;
    entry["atom"] = render(atom);
    entry["axiom"] = choice.axiom_id;
    entry["skolem_args"] = nlohmann::json::array();
    for (const Term& t : choice.skolem_args)
      entry["skolem_args"].push_back(render(t));
    j["inferred"].push_back(std::move(entry));
  }
  j["factored"] = nlohmann::json::array();
  for (const auto& [from, to] : sol.factored) {
    nlohmann::ordered_json entry;
    entry["from"] = render(from);
    entry["to"] = render(to);
    j["factored"].push_back(std::move(entry));
  }
  j["eq_classes"] = nlohmann::json::array();
  for (const auto& cls : sol.eq.classes()) {
    nlohmann::ordered_json c = nlohmann::ordered_json::array();
    for (const Term& t : cls) c.push_back(render(t));
    j["eq_classes"].push_back(std::move(c));
  }
  return j.dump(2) + "\n";
}

Solution parse_solution(const std::string& json_text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::exception& e) {
    throw HornError(ErrorCode::SyntaxError,
                    std::string("malformed solution JSON: ") + e.what());
  }
  auto bad = [](const std::string& what) -> HornError {
    return HornError(ErrorCode::SyntaxError, "malformed solution JSON: " + what);
  };
  if (!j.is_object()) throw bad("top level must be an object");

  Solution sol;
  if (j.contains("objective")) {
    if (!j["objective"].is_string()) throw bad("objective must be a string");
    sol.objective = j["objective"].get<std::string>();
  }
  if (!j.contains("cost") || !j["cost"].is_number_integer())
    throw bad("cost must be an integer");
  sol.objective_value = j["cost"].get<long long>();

  auto note_atom = [&](const Atom& atom, const char* where) {
    if (sol.true_atoms.count(atom))
      throw HornError(ErrorCode::SemanticError,
                      "atom " + render(atom) + " listed more than once (" +
                          where + ")");
    sol.true_atoms.insert(atom);
  };

  if (!j.contains("abduced") || !j["abduced"].is_array())
    throw bad("abduced must be an array");
  for (const auto& entry : j["abduced"]) {
    if (!entry.is_string()) throw bad("abduced entries must be strings");
    Atom atom = parse_atom(entry.get<std::string>());
    note_atom(atom, "abduced");
    sol.abduced.insert(atom);
  }

  if (!j.contains("inferred") || !j["inferred"].is_array())
    throw bad("inferred must be an array");
  for (const auto& entry : j["inferred"]) {
    if (!entry.is_object() || !entry.contains("atom") ||
        !entry.contains("axiom") || !entry.contains("skolem_args"))
      throw bad("inferred entries need atom, axiom, skolem_args");
    Atom atom = parse_atom(entry["atom"].get<std::string>());
    InferenceChoice choice;
    choice.axiom_id = entry["axiom"].get<std::string>();
    for (const auto& argj : entry["skolem_args"]) {
      if (!argj.is_string()) throw bad("skolem_args entries must be strings");
      choice.skolem_args.push_back(parse_term(argj.get<std::string>()));
    }
    note_atom(atom, "inferred");
    sol.inferred.emplace(atom, std::move(choice));
  }

  if (!j.contains("factored") || !j["factored"].is_array())
    throw bad("factored must be an array");
  for (const auto& entry : j["factored"]) {
    if (!entry.is_object() || !entry.contains("from") || !entry.contains("to"))
      throw bad("factored entries need from and to");
    Atom from = parse_atom(entry["from"].get<std::string>());
    Atom to = parse_atom(entry["to"].get<std::string>());
    note_atom(from, "factored");
    sol.factored.emplace(from, to);
  }
  // Factoring targets must themselves be true; they live in one of the three
  // parts, so membership is re-checked here once all parts are loaded.
  for (const auto& [from, to] : sol.factored) {
    if (!sol.true_atoms.count(to))
      throw HornError(ErrorCode::SemanticError,
                      "factoring target " + render(to) + " is not listed");
  }

  if (!j.contains("eq_classes") || !j["eq_classes"].is_array())
    throw bad("eq_classes must be an array");
  std::set<Term> class_members;
  for (const auto& cls : j["eq_classes"]) {
    if (!cls.is_array() || cls.size() < 2)
      throw bad("eq classes must be arrays of at least two terms");
    std::vector<Term> members;
    for (const auto& tj : cls) {
      if (!tj.is_string()) throw bad("eq class members must be strings");
      members.push_back(parse_term(tj.get<std::string>()));
    }
    for (const Term& t : members) {
      if (!class_members.insert(t).second)
        throw HornError(ErrorCode::SemanticError,
                        "eq classes are not disjoint at " + render(t));
    }
    for (std::size_t i = 0; i < members.size(); ++i)
      for (std::size_t k = i + 1; k < members.size(); ++k)
        sol.eq.relate(members[i], members[k]);
  }
  return sol;
}

}  // namespace horn
