#include <horn/asp_export.hpp>

#include <horn/term.hpp>

#include <map>
#include <sstream>
#include <string>
#include <vector>

namespace horn {

namespace {

// Renames schematic variables to V1, V2, ... in first-occurrence order
// within one emitted rule (head first, then body left to right).
class VarNamer {
 public:
  std::string operator()(const std::string& var) {
    auto it = names_.find(var);
    if (it == names_.end()) {
      it = names_.emplace(var, "V" + std::to_string(names_.size() + 1)).first;
    }
    return it->second;
  }

 private:
  std::map<std::string, std::string> names_;
};

std::string ground_cterm(const Atom& a) {
  std::string out = "c(" + a.predicate;
  for (const Term& t : a.args) out += "," + render(t);
  out += ")";
  return out;
}

std::string pattern_cterm(const AtomPattern& pat, VarNamer& names) {
  std::string out = "c(" + pat.predicate;
  for (const PatTerm& arg : pat.args) {
    out += "," + (arg.is_var ? names(arg.name) : arg.name);
  }
  out += ")";
  return out;
}

// The witness tuple l(Z1,...,Zv), or bare l when the axiom invents nothing.
std::string witness_tuple(const AxiomSchema& ax, VarNamer& names) {
  if (ax.existential_vars.empty()) return "l";
  std::string out = "l(";
  bool first = true;
  for (const std::string& z : ax.existential_vars) {
    if (!first) out += ",";
    first = false;
    out += names(z);
  }
  out += ")";
  return out;
}

// One structured-witness assignment `Vz = s(id,"Z",H1,...,Hk)`.
std::string witness_assignment(const AxiomSchema& ax, const std::string& z,
                               VarNamer& names) {
  std::string out = names(z) + " = s(" + ax.id + ",\"" + z + "\"";
  for (const std::string& hv : ax.head_vars) out += "," + names(hv);
  out += ")";
  return out;
}

void emit_bwd_axiom(std::ostringstream& os, const AxiomSchema& ax) {
  {
    VarNamer names;
    std::string head = pattern_cterm(ax.head, names);
    std::string witness = witness_tuple(ax, names);
    os << "mayInferVia(" << ax.id << "," << head << "," << witness
       << ") :- pot(" << head << ")";
    for (const std::string& z : ax.existential_vars) {
      os << ", " << witness_assignment(ax, z, names);
    }
    os << ".\n";
  }
  for (auto it = ax.body.rbegin(); it != ax.body.rend(); ++it) {
    VarNamer names;
    std::string head = pattern_cterm(ax.head, names);
    std::string need = pattern_cterm(*it, names);
    os << "inferenceNeeds(" << head << "," << ax.id << "," << need
       << ") :- mayInferVia(" << ax.id << "," << head << ","
       << witness_tuple(ax, names) << ").\n";
  }
  os << "numberofbodies(" << ax.id << "," << ax.body.size() << ").\n";
}

void emit_fwd_axiom(std::ostringstream& os, const AxiomSchema& ax) {
  {
    VarNamer names;
    os << "infer(" << pattern_cterm(ax.head, names) << ") :- ";
    bool first = true;
    for (auto it = ax.body.rbegin(); it != ax.body.rend(); ++it) {
      if (!first) os << ", ";
      first = false;
      os << "true(" << pattern_cterm(*it, names) << ")";
    }
    os << ".\n";
  }
  for (auto it = ax.body.rbegin(); it != ax.body.rend(); ++it) {
    VarNamer names;
    os << "pot(" << pattern_cterm(*it, names) << ") :- pot("
       << pattern_cterm(ax.head, names) << ")";
    for (const std::string& z : ax.existential_vars) {
      os << ", " << witness_assignment(ax, z, names);
    }
    os << ".\n";
  }
}

// c(V1,V<lo>,...,V<lo+arity-1>) -- V1 is always the shared predicate slot.
std::string cvar(int lo, int arity) {
  std::string out = "c(V1";
  for (int j = 0; j < arity; ++j) out += ",V" + std::to_string(lo + j);
  out += ")";
  return out;
}

void emit_hu_rules(std::ostringstream& os, int max_arity) {
  for (int arity = 1; arity <= max_arity; ++arity) {
    for (int pos = 0; pos < arity; ++pos) {
      os << "hu(V1) :- pot(c(_";
      for (int j = 0; j < arity; ++j) os << "," << (j == pos ? "V1" : "_");
      os << ")).\n";
    }
  }
}

void emit_eq_rules(std::ostringstream& os) {
  os << "uhu(V1) :- hu(V1), not sortname(V1).\n";
  os << "{ eq(V1,V2) : uhu(V1), uhu(V2), V1 != V2 }.\n";
  os << "eq(V1,V1) :- hu(V1).\n";
  os << ":- eq(V1,V2), not eq(V2,V1).\n";
  os << ":- eq(V1,V2), eq(V2,V3), V1 != V2, V2 != V3, V1 != V3, "
        "not eq(V1,V3).\n";
}

// The pairwise clustering rules shared by the assumption-factoring variants:
// every related fa pair is ordered into factorCluster, and each cluster
// factors onto its smallest member.
void emit_cluster_rules(std::ostringstream& os, int max_arity) {
  for (int arity = 1; arity <= max_arity; ++arity) {
    std::string big = cvar(2, arity);
    std::string small = cvar(2 + arity, arity);
    os << "factorCluster(" << big << "," << small << ") :- fa(" << small
       << "), fa(" << big << ")";
    for (int j = 0; j < arity; ++j) {
      os << ", eq(V" << (2 + arity + j) << ",V" << (2 + j) << ")";
    }
    os << ", " << small << " < " << big << ".\n";
  }
  os << "factorClusterAbove(V1) :- factorCluster(V1,_).\n";
  os << "factorVia(V1,V2) :- factorCluster(V1,V2), "
        "not factorClusterAbove(V2).\n";
  os << "factor(V1) :- factorVia(V1,_).\n";
  os << "abduce(V1) :- fa(V1), not factor(V1).\n";
}

void emit_below_rules(std::ostringstream& os) {
  os << "below(V1,V2) :- inferVia(V3,V1), inferenceNeeds(V1,V3,V2).\n";
  os << "below(V1,V2) :- factorVia(V1,V2).\n";
  os << "below(V1,V2) :- below(V1,V3), below(V3,V2).\n";
}

void emit_bwd_common(std::ostringstream& os, int max_arity) {
  os << "pot(V1) :- goal(V1).\n";
  os << "pot(V1) :- inferenceNeeds(_,_,V1).\n";
  os << "true(V1) :- goal(V1).\n";
  os << "1 <= { infer(V1) ; fai(V1) } <= 1 :- true(V1).\n";
  os << "1 <= { inferVia(V1,V2) : mayInferVia(V1,V2,_) } <= 1 :- "
        "infer(V2).\n";
  os << "true(V1) :- inferVia(V2,V3), inferenceNeeds(V3,V2,V1).\n";
  emit_hu_rules(os, max_arity);
  emit_eq_rules(os);
}

void emit_bwdg_block(std::ostringstream& os, int max_arity) {
  emit_below_rules(os);
  os << "1 <= { factor(V1) ; abduce(V1) } <= 1 :- fai(V1).\n";
  for (int arity = 1; arity <= max_arity; ++arity) {
    std::string from = cvar(2, arity);
    std::string onto = cvar(2 + arity, arity);
    os << "factorVia(" << from << "," << onto << ") :- factor(" << from
       << "), infer(" << onto << ")";
    for (int j = 0; j < arity; ++j) {
      os << ", eq(V" << (2 + j) << ",V" << (2 + arity + j) << ")";
    }
    os << ", not below(" << onto << "," << from << ").\n";
  }
  for (int arity = 1; arity <= max_arity; ++arity) {
    std::string from = cvar(2, arity);
    std::string onto = cvar(2 + arity, arity);
    os << "factorVia(" << from << "," << onto << ") :- factor(" << from
       << "), abduce(" << onto << ")";
    for (int j = 0; j < arity; ++j) {
      os << ", eq(V" << (2 + j) << ",V" << (2 + arity + j) << ")";
    }
    os << ".\n";
  }
  os << "factorOk(V1) :- factorVia(V1,_).\n";
  os << ":- factor(V1), not factorOk(V1).\n";
}

void emit_bwdai_block(std::ostringstream& os, int max_arity) {
  emit_below_rules(os);
  for (int arity = 1; arity <= max_arity; ++arity) {
    std::string from = cvar(2, arity);
    std::string onto = cvar(2 + arity, arity);
    os << "factorViaI(" << from << "," << onto << ") :- fai(" << from
       << "), infer(" << onto << ")";
    for (int j = 0; j < arity; ++j) {
      os << ", eq(V" << (2 + j) << ",V" << (2 + arity + j) << ")";
    }
    os << ", not below(" << onto << "," << from << ").\n";
  }
  os << "factorI(V1) :- factorViaI(V1,_).\n";
  os << "fa(V1) :- fai(V1), not factorI(V1).\n";
  os << "factorVia(V1,V2) :- factorViaI(V1,V2).\n";
  emit_cluster_rules(os, max_arity);
}

void emit_bwda_block(std::ostringstream& os, int max_arity) {
  os << "fa(V1) :- fai(V1).\n";
  emit_cluster_rules(os, max_arity);
}

void emit_fwda_encoding(std::ostringstream& os, int max_arity) {
  os << "pot(V1) :- goal(V1).\n";
  os << "{ fai(V1) : pot(V1) }.\n";
  os << "true(V1) :- fai(V1).\n";
  os << "true(V1) :- infer(V1).\n";
  os << ":- goal(V1), not true(V1).\n";
  os << "fa(V1) :- fai(V1), not infer(V1).\n";
  emit_hu_rules(os, max_arity);
  emit_eq_rules(os);
  emit_cluster_rules(os, max_arity);
}

}  // namespace

std::string emit_facts(const AbductionInstance& instance) {
  std::ostringstream os;
  for (const Atom& g : instance.goal) {
    os << "goal(" << ground_cterm(g) << ").\n";
  }
  for (const std::string& s : instance.sort_names) {
    os << "sortname(" << s << ").\n";
  }
  for (const AxiomSchema& ax : instance.axioms) {
    os << "numberofbodies(" << ax.id << "," << ax.body.size() << ").\n";
  }
  return os.str();
}

std::string emit_axiom_rules(const AbductionInstance& instance,
                             EncodingVariant variant) {
  std::ostringstream os;
  for (const AxiomSchema& ax : instance.axioms) {
    if (variant == EncodingVariant::Fwda) {
      emit_fwd_axiom(os, ax);
    } else {
      emit_bwd_axiom(os, ax);
    }
  }
  return os.str();
}

std::string emit_encoding(EncodingVariant variant, int max_arity) {
  if (max_arity < 1) {
    throw HornError(ErrorCode::InvalidArgument,
                    "encoding needs a positive maximum arity");
  }
  std::ostringstream os;
  switch (variant) {
    case EncodingVariant::Bwdg:
      emit_bwd_common(os, max_arity);
      emit_bwdg_block(os, max_arity);
      break;
    case EncodingVariant::Bwdai:
      emit_bwd_common(os, max_arity);
      emit_bwdai_block(os, max_arity);
      break;
    case EncodingVariant::Bwda:
      emit_bwd_common(os, max_arity);
      emit_bwda_block(os, max_arity);
      break;
    case EncodingVariant::Fwda:
      emit_fwda_encoding(os, max_arity);
      break;
  }
  return os.str();
}

std::string emit_objective(Objective objective) {
  std::ostringstream os;
  switch (objective) {
    case Objective::Card:
      os << ":~ abduce(V1). [1@1,V1]\n";
      break;
    case Objective::Coherence:
      os << "reach(V1,V1) :- goal(V1).\n";
      os << "reach(V1,V2) :- reach(V3,V2), inferVia(V4,V3), "
            "inferenceNeeds(V3,V4,V1).\n";
      os << "reach(V1,V2) :- reach(V3,V2), factorVia(V3,V1).\n";
      os << "reachFromBoth(V1,V2) :- goal(V1), goal(V2), V1 < V2, "
            "reach(V3,V1), reach(V3,V2).\n";
      os << ":~ goal(V1), goal(V2), V1 < V2, not reachFromBoth(V1,V2). "
            "[1@1,V1,V2]\n";
      break;
    case Objective::WeightedAbduction:
      os << "pcost(V1,100) :- goal(V1).\n";
      os << "pcost(V1,V2) :- inferVia(V3,V4), inferenceNeeds(V4,V3,V1), "
            "V2 = #max { (V5*6/5)/V6 ; 1 }, pcost(V4,V5), "
            "numberofbodies(V3,V6).\n";
      os << "pcost(V1,V2) :- factorVia(V3,V1), pcost(V3,V2).\n";
      os << "cost(V1,V2) :- abduce(V1), V2 = #min { V3 : pcost(V1,V3) }.\n";
      os << ":~ cost(V1,V2). [V2@1,V1]\n";
      break;
  }
  return os.str();
}

std::string emit_global_constraints(const AbductionInstance& instance) {
  std::ostringstream os;
  for (const NogoodPattern& ng : instance.nogoods) {
    // Every variable occurrence gets its own rule variable; occurrences of
    // the same pattern variable are joined through eq.
    std::map<std::string, std::vector<std::string>> occurrences;
    std::vector<std::string> literals;
    int next = 1;
    for (const AtomPattern& pat : ng.atoms) {
      std::string lit = "abduce(c(" + pat.predicate;
      for (const PatTerm& arg : pat.args) {
        if (arg.is_var) {
          std::string v = "V" + std::to_string(next++);
          occurrences[arg.name].push_back(v);
          lit += "," + v;
        } else {
          lit += "," + arg.name;
        }
      }
      lit += "))";
      literals.push_back(lit);
    }
    os << ":- ";
    bool first = true;
    for (const std::string& lit : literals) {
      if (!first) os << ", ";
      first = false;
      os << lit;
    }
    for (const auto& [var, names] : occurrences) {
      for (std::size_t i = 1; i < names.size(); ++i) {
        os << ", eq(" << names[i - 1] << "," << names[i] << ")";
      }
    }
    os << ".\n";
  }
  for (const UniqueSlot& slot : instance.unique_slots) {
    int arity = slot.arity();
    std::vector<bool> is_key(arity, false);
    for (int k : slot.key_positions) is_key[k] = true;
    for (int value_pos : slot.value_positions) {
      std::vector<std::string> a(arity), b(arity);
      int next = 1;
      for (int j = 0; j < arity; ++j) a[j] = "V" + std::to_string(next++);
      for (int j = 0; j < arity; ++j) b[j] = "V" + std::to_string(next++);
      auto atom = [&](const std::vector<std::string>& vars) {
        std::string out = "true(c(" + slot.predicate;
        for (const std::string& v : vars) out += "," + v;
        out += "))";
        return out;
      };
      os << ":- " << atom(a) << ", " << atom(b);
      for (int k : slot.key_positions) {
        os << ", eq(" << a[k] << "," << b[k] << ")";
      }
      os << ", " << a[value_pos] << " < " << b[value_pos] << ", not eq("
         << a[value_pos] << "," << b[value_pos] << ").\n";
    }
  }
  return os.str();
}

}  // namespace horn
