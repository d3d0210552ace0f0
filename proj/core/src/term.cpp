#include <horn/term.hpp>

#include <algorithm>
#include <map>

namespace horn {

Term Term::make_const(std::string name) {
  Term t;
  t.kind = Kind::Const;
  t.name = std::move(name);
  return t;
}

Term Term::make_flat(int index) {
  Term t;
  t.kind = Kind::FlatSkolem;
  t.flat_index = index;
  return t;
}

Term Term::make_skolem(std::string axiom_id, std::string var_name,
                       std::vector<Term> args) {
  Term t;
  t.kind = Kind::Skolem;
  t.axiom_id = std::move(axiom_id);
  t.name = std::move(var_name);
  t.args = std::move(args);
  return t;
}

int compare(const Term& a, const Term& b) {
  if (a.kind != b.kind) return a.kind < b.kind ? -1 : 1;
  switch (a.kind) {
    case Term::Kind::Const:
      return a.name.compare(b.name) < 0 ? -1 : (a.name == b.name ? 0 : 1);
    case Term::Kind::FlatSkolem:
      return a.flat_index < b.flat_index ? -1
                                         : (a.flat_index == b.flat_index ? 0 : 1);
    case Term::Kind::Skolem: {
      if (int c = a.axiom_id.compare(b.axiom_id); c != 0) return c < 0 ? -1 : 1;
      if (int c = a.name.compare(b.name); c != 0) return c < 0 ? -1 : 1;
      std::size_t n = std::min(a.args.size(), b.args.size());
      for (std::size_t i = 0; i < n; ++i) {
        if (int c = compare(a.args[i], b.args[i]); c != 0) return c;
      }
      if (a.args.size() != b.args.size())
        return a.args.size() < b.args.size() ? -1 : 1;
      return 0;
    }
  }
  return 0;
}

bool operator==(const Term& a, const Term& b) { return compare(a, b) == 0; }
bool operator!=(const Term& a, const Term& b) { return compare(a, b) != 0; }
bool operator<(const Term& a, const Term& b) { return compare(a, b) < 0; }

int compare(const Atom& a, const Atom& b) {
  if (int c = a.predicate.compare(b.predicate); c != 0) return c < 0 ? -1 : 1;
  std::size_t n = std::min(a.args.size(), b.args.size());
  for (std::size_t i = 0; i < n; ++i) {
    if (int c = compare(a.args[i], b.args[i]); c != 0) return c;
  }
  if (a.args.size() != b.args.size())
    return a.args.size() < b.args.size() ? -1 : 1;
  return 0;
}

bool operator==(const Atom& a, const Atom& b) { return compare(a, b) == 0; }
bool operator!=(const Atom& a, const Atom& b) { return compare(a, b) != 0; }
bool operator<(const Atom& a, const Atom& b) { return compare(a, b) < 0; }

std::string render(const Term& t) {
  switch (t.kind) {
    case Term::Kind::Const:
      return t.name;
    case Term::Kind::FlatSkolem:
      return "p" + std::to_string(t.flat_index);
    case Term::Kind::Skolem: {
      std::string out = "s(" + t.axiom_id + ",\"" + t.name + "\"";
      for (const Term& arg : t.args) out += "," + render(arg);
      out += ")";
      return out;
    }
  }
  return {};
}

std::string render(const Atom& a) {
  if (a.args.empty()) return a.predicate;
  std::string out = a.predicate + "(";
  for (std::size_t i = 0; i < a.args.size(); ++i) {
    if (i) out += ",";
    out += render(a.args[i]);
  }
  out += ")";
  return out;
}

int term_depth(const Term& t) {
  if (t.kind != Term::Kind::Skolem) return 0;
  int deepest = 0;
  for (const Term& arg : t.args) deepest = std::max(deepest, term_depth(arg));
  return 1 + deepest;
}

int same_origin_nesting(const Term& t, const std::string& axiom_id,
                        const std::string& var_name) {
  if (t.kind != Term::Kind::Skolem) return 0;
  int below = 0;
  for (const Term& arg : t.args)
    below = std::max(below, same_origin_nesting(arg, axiom_id, var_name));
  int self = (t.axiom_id == axiom_id && t.name == var_name) ? 1 : 0;
  return self + below;
}

void EqRelation::relate(const Term& a, const Term& b) {
  int c = compare(a, b);
  if (c == 0) return;
  if (c < 0)
    pairs_.insert({a, b});
  else
    pairs_.insert({b, a});
}

bool EqRelation::related(const Term& a, const Term& b) const {
  int c = compare(a, b);
  if (c == 0) return true;
  return c < 0 ? pairs_.count({a, b}) > 0 : pairs_.count({b, a}) > 0;
}

namespace {

// Union-find over the terms mentioned in a pair set.
class TermUnionFind {
 public:
  explicit TermUnionFind(const std::set<std::pair<Term, Term>>& pairs) {
    for (const auto& [a, b] : pairs) {
      add(a);
      add(b);
    }
    for (const auto& [a, b] : pairs) merge(a, b);
  }

  int find(int i) {
    while (parent_[i] != i) {
      parent_[i] = parent_[parent_[i]];
      i = parent_[i];
    }
    return i;
  }

  int index_of(const Term& t) const {
    auto it = index_.find(t);
    return it == index_.end() ? -1 : it->second;
  }

  const std::map<Term, int>& index() const { return index_; }

 private:
  void add(const Term& t) {
    if (index_.count(t)) return;
    int id = static_cast<int>(parent_.size());
    index_[t] = id;
    parent_.push_back(id);
  }

  void merge(const Term& a, const Term& b) {
    int ra = find(index_[a]), rb = find(index_[b]);
    if (ra != rb) parent_[ra] = rb;
  }

  std::map<Term, int> index_;
  std::vector<int> parent_;
};

}  // namespace

bool EqRelation::is_transitive() const {
  TermUnionFind uf(pairs_);
  std::vector<Term> terms;
  for (const auto& [t, id] : uf.index()) terms.push_back(t);
  TermUnionFind& mut = uf;
  for (std::size_t i = 0; i < terms.size(); ++i) {
    for (std::size_t j = i + 1; j < terms.size(); ++j) {
      int ri = mut.find(mut.index_of(terms[i]));
      int rj = mut.find(mut.index_of(terms[j]));
      if (ri == rj && !related(terms[i], terms[j])) return false;
    }
  }
  return true;
}

EqRelation EqRelation::transitive_closure() const {
  TermUnionFind uf(pairs_);
  std::vector<Term> terms;
  for (const auto& [t, id] : uf.index()) terms.push_back(t);
  EqRelation closed;
  for (std::size_t i = 0; i < terms.size(); ++i) {
    for (std::size_t j = i + 1; j < terms.size(); ++j) {
      if (uf.find(uf.index_of(terms[i])) == uf.find(uf.index_of(terms[j])))
        closed.relate(terms[i], terms[j]);
    }
  }
  return closed;
}

std::vector<std::vector<Term>> EqRelation::classes() const {
  TermUnionFind uf(pairs_);
  std::map<int, std::vector<Term>> by_root;
  for (const auto& [t, id] : uf.index()) by_root[uf.find(id)].push_back(t);
  std::vector<std::vector<Term>> out;
  for (auto& [root, members] : by_root) {
    if (members.size() < 2) continue;
    std::sort(members.begin(), members.end());
    out.push_back(std::move(members));
  }
  std::sort(out.begin(), out.end(),
            [](const auto& a, const auto& b) { return a.front() < b.front(); });
  return out;
}

std::set<Term> EqRelation::mentioned() const {
  std::set<Term> out;
  for (const auto& [a, b] : pairs_) {
    out.insert(a);
    out.insert(b);
  }
  return out;
}

bool unifiable_under_eq(const Atom& a, const Atom& b, const EqRelation& eq) {
  if (a.predicate != b.predicate || a.args.size() != b.args.size()) return false;
  for (std::size_t i = 0; i < a.args.size(); ++i) {
    if (a.args[i] == b.args[i]) continue;
    if (!eq.related(a.args[i], b.args[i])) return false;
  }
  return true;
}

}  // namespace horn
