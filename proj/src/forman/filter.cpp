#include "evtrace/forman/filter.hpp"

#include <map>

namespace evtrace {

bool Footprint::matches(EventKind k, std::string_view normalized_name,
                        std::string_view function) const {
  if (k != kind) return false;
  if (name && *name != normalized_name) return false;
  if (enclosing_function && *enclosing_function != function) return false;
  return true;
}

std::string Footprint::describe() const {
  std::string out(kind_name(kind));
  if (name) out += " IS '" + *name + "'";
  if (enclosing_function) out += " WITHIN " + *enclosing_function;
  return out;
}

std::string Filter::summary() const {
  if (pass_all) return "pass-all";
  std::string out = "footprints:";
  for (const auto& f : footprints) out += " [" + f.describe() + "]";
  out += " keep:";
  for (const auto& f : keep_structure) out += " [" + f.describe() + "]";
  return out;
}

bool admits(const Filter& filter, EventKind kind, std::string_view name,
            std::string_view enclosing_function) {
  if (filter.pass_all) return true;
  std::string normalized;
  bool have_normalized = false;
  for (const auto* set : {&filter.footprints, &filter.keep_structure}) {
    for (const Footprint& f : *set) {
      if (f.kind != kind) continue;
      if (f.name && !have_normalized) {
        normalized = minic::normalize_ws(name);
        have_normalized = true;
      }
      if (f.matches(kind, f.name ? std::string_view(normalized) : name,
                    enclosing_function)) {
        return true;
      }
    }
  }
  return false;
}

namespace {

using forman::Aggregate;
using forman::Pattern;
using forman::TExpr;

class FootprintBuilder {
 public:
  FilterPlan run(const forman::RuleSet& rules) {
    for (const auto& rule : rules.rules) {
      within_ = rule.within;
      if (within_) {
        plan_.filter.keep_structure.insert(
            Footprint{EventKind::FuncCall, *within_, std::nullopt});
      }
      Env env;
      walk(*rule.assertion, env);
      // Metavariables bound by the assertion's quantifiers stay visible in
      // the SAY clauses.
      for (const auto* clauses : {&rule.say, &rule.onfail}) {
        for (const auto& clause : *clauses) {
          for (const auto& item : clause) walk(*item, env);
        }
      }
    }
    return std::move(plan_);
  }

 private:
  using Env = std::map<std::string, Footprint>;

  Footprint footprint(const Pattern& p) const {
    Footprint f;
    f.kind = p.kind;
    if (p.is_literal) f.name = minic::normalize_ws(*p.is_literal);
    f.enclosing_function = within_;
    return f;
  }

  // Records the selection and returns the environment its body sees.
  Env select(const Pattern& p, const std::string& from, const Env& env) {
    const Footprint f = footprint(p);
    plan_.filter.footprints.insert(f);
    if (!from.empty()) {
      auto scope = env.find(from);
      if (scope != env.end()) plan_.filter.keep_structure.insert(scope->second);
    }
    Env inner = env;
    if (!p.metavar.empty()) inner[p.metavar] = f;
    if (p.context) walk(*p.context, inner);
    return inner;
  }

  void walk(const TExpr& e, Env& env) {
    switch (e.kind) {
      case TExpr::Kind::Quantified: {
        Env inner = select(e.pattern, e.from, env);
        for (const auto& o : e.operands) walk(*o, inner);
        env = std::move(inner);
        return;
      }
      case TExpr::Kind::Card:
      case TExpr::Kind::List:
      case TExpr::Kind::Satisfies: {
        const Aggregate& a = *e.aggregate;
        Env inner = select(a.pattern, a.from, env);
        if (a.apply) walk(*a.apply, inner);
        return;
      }
      case TExpr::Kind::ValueAt: {
        auto target = env.find(e.text);
        if (target == env.end()) return;
        add_probe(target->second, e);
        return;
      }
      default:
        for (const auto& o : e.operands) walk(*o, env);
    }
  }

  void add_probe(const Footprint& target, const TExpr& e) {
    for (const auto& p : plan_.probes) {
      if (p.target == target && p.expr_text == e.probe_text) return;
    }
    plan_.probes.push_back(ProbeRequest{target, e.probe, e.probe_text});
  }

  std::optional<std::string> within_;
  FilterPlan plan_;
};

}  // namespace

FilterPlan derive_footprint(const forman::RuleSet& rules) {
  return FootprintBuilder().run(rules);
}

}  // namespace evtrace
