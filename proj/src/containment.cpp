#include "fedra/containment.hpp"

#include <algorithm>
#include <vector>

namespace fedra {

bool subsumes(const TriplePattern& general, const TriplePattern& specific) {
  std::map<std::string, PatternTerm> sigma;
  for (std::size_t i = 0; i < 3; ++i) {
    const PatternTerm& g = general.at(i);
    const PatternTerm& s = specific.at(i);
    if (g.is_ground()) {
      if (g != s) return false;
      continue;
    }
    auto [it, inserted] = sigma.emplace(g.variable(), s);
    if (!inserted && it->second != s) return false;
  }
  return true;
}

namespace {

// Union-find over scoped variable names with an optional ground binding per class.
class Unifier {
 public:
  std::string find(const std::string& v) {
    auto it = parent_.find(v);
    if (it == parent_.end()) {
      parent_.emplace(v, v);
      return v;
    }
    if (it->second == v) return v;
    std::string root = find(it->second);
    parent_[v] = root;
    return root;
  }

  std::optional<Term> binding(const std::string& v) {
    auto it = bound_.find(find(v));
    return it == bound_.end() ? std::nullopt : std::optional<Term>(it->second);
  }

  bool bind(const std::string& v, const Term& t) {
    const std::string root = find(v);
    auto [it, inserted] = bound_.emplace(root, t);
    return inserted || it->second == t;
  }

  bool merge(const std::string& a, const std::string& b) {
    const std::string ra = find(a);
    const std::string rb = find(b);
    if (ra == rb) return true;
    const auto ba = binding(ra);
    const auto bb = binding(rb);
    if (ba && bb && *ba != *bb) return false;
    parent_[rb] = ra;
    if (!ba && bb) bound_.insert_or_assign(ra, *bb);
    return true;
  }

 private:
  std::map<std::string, std::string> parent_;
  std::map<std::string, Term> bound_;
};

}  // namespace

std::optional<TriplePattern> unify(const TriplePattern& a, const TriplePattern& b) {
  Unifier u;
  auto scoped = [](char side, const std::string& name) { return std::string(1, side) + ":" + name; };
  for (std::size_t i = 0; i < 3; ++i) {
    const PatternTerm& x = a.at(i);
    const PatternTerm& y = b.at(i);
    if (x.is_ground() && y.is_ground()) {
      if (x.term() != y.term()) return std::nullopt;
    } else if (x.is_ground()) {
      if (!u.bind(scoped('b', y.variable()), x.term())) return std::nullopt;
    } else if (y.is_ground()) {
      if (!u.bind(scoped('a', x.variable()), y.term())) return std::nullopt;
    } else if (!u.merge(scoped('a', x.variable()), scoped('b', y.variable()))) {
      return std::nullopt;
    }
  }

  // Name each unbound class after the first of `a`'s variables in it.
  std::map<std::string, std::string> names;
  for (std::size_t i = 0; i < 3; ++i) {
    if (a.at(i).is_variable()) names.emplace(u.find(scoped('a', a.at(i).variable())), a.at(i).variable());
  }
  std::vector<PatternTerm> out;
  for (std::size_t i = 0; i < 3; ++i) {
    const PatternTerm& x = a.at(i);
    if (x.is_ground()) {
      out.push_back(x);
      continue;
    }
    const std::string key = scoped('a', x.variable());
    if (auto t = u.binding(key)) {
      out.emplace_back(*t);
    } else {
      out.push_back(PatternTerm::var(names.at(u.find(key))));
    }
  }
  // The object position may legally hold a literal; subject/predicate cannot
  // here because both inputs forbid it.
  return TriplePattern(out[0], out[1], out[2]);
}

bool contained_wrt(const TriplePattern& tp, const FragmentDef& inner, const FragmentDef& outer) {
  if (inner.source != outer.source) return false;
  const auto specialized = unify(inner.selector, tp);
  if (!specialized) return false;
  return subsumes(outer.selector, *specialized);
}

bool relevant(const std::string& endpoint, const FragmentDef& fragment, const TriplePattern& tp,
              const FragmentProbe& probe) {
  const auto specialized = unify(fragment.selector, tp);
  if (!specialized) return false;
  if (subsumes(tp, fragment.selector)) return true;
  return probe(endpoint, fragment, *specialized);
}

double visibility_draw(std::uint64_t seed, const std::string& a, const std::string& b) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  auto feed = [&](const std::string& s) {
    for (const unsigned char c : s) {
      h ^= c;
      h *= 0x100000001b3ULL;
    }
    h ^= 0x1f;
    h *= 0x100000001b3ULL;
  };
  feed(a);
  feed(b);
  // splitmix64 finalizer over the hash mixed with the seed
  std::uint64_t z = h + seed * 0x9e3779b97f4a7c15ULL + 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  z ^= z >> 31;
  return static_cast<double>(z >> 11) * 0x1.0p-53;
}

bool ContainmentRelation::contains(const std::string& inner_id, const std::string& outer_id) const {
  return pairs_.contains({inner_id, outer_id});
}

bool ContainmentRelation::related(const FragmentDef& a, const FragmentDef& b) const {
  const std::string ka = a.logical_key();
  const std::string kb = b.logical_key();
  if (ka == kb) return true;
  if (a.source != b.source) return false;
  return visible_logical_pairs_.contains(std::minmax(ka, kb));
}

bool ContainmentRelation::endpoints_equivalent(const std::string& logical_key, const std::string& e1,
                                               const std::string& e2) const {
  if (e1 == e2) return true;
  auto it = classes_.find(logical_key);
  if (it == classes_.end()) return false;
  auto a = it->second.find(e1);
  auto b = it->second.find(e2);
  return a != it->second.end() && b != it->second.end() && a->second == b->second;
}

std::map<std::string, std::set<std::set<std::string>>> ContainmentRelation::equivalence_classes() const {
  std::map<std::string, std::set<std::set<std::string>>> out;
  for (const auto& [key, members] : classes_) {
    std::map<std::string, std::set<std::string>> by_rep;
    for (const auto& [endpoint, rep] : members) by_rep[rep].insert(endpoint);
    for (auto& [rep, cls] : by_rep) out[key].insert(std::move(cls));
  }
  return out;
}

std::string ContainmentRelation::dump() const {
  std::string out;
  for (const auto& [inner, outer] : pairs_) {
    if (inner != outer) out += inner + " <= " + outer + "\n";
  }
  return out;
}

ContainmentRelation build_containment(const FederationCatalog& catalog) {
  ContainmentRelation rel;
  const double visibility = catalog.containment_visibility;
  const std::uint64_t seed = catalog.containment_seed;
  auto visible = [&](const std::string& a, const std::string& b) { return visibility_draw(seed, a, b) < visibility; };

  std::vector<const FragmentDef*> frags;
  for (const auto& [id, f] : catalog.fragments()) frags.push_back(&f);

  for (const FragmentDef* a : frags) {
    for (const FragmentDef* b : frags) {
      if (a->source != b->source) continue;
      const std::string ka = a->logical_key();
      const std::string kb = b->logical_key();
      if (ka == kb) {
        rel.pairs_.emplace(a->id, b->id);
        continue;
      }
      const auto key_pair = std::minmax(ka, kb);
      const bool pair_visible = visible("fragments|" + key_pair.first, key_pair.second);
      if (pair_visible) rel.visible_logical_pairs_.insert(key_pair);
      if (pair_visible && subsumes(b->selector, a->selector)) rel.pairs_.emplace(a->id, b->id);
    }
  }

  // Transitive closure over the visible pairs.
  bool changed = true;
  while (changed) {
    changed = false;
    std::vector<std::pair<std::string, std::string>> additions;
    for (const auto& [x, y] : rel.pairs_) {
      for (auto it = rel.pairs_.lower_bound({y, std::string()}); it != rel.pairs_.end() && it->first == y; ++it) {
        if (!rel.pairs_.contains({x, it->second})) additions.emplace_back(x, it->second);
      }
    }
    for (auto& p : additions) changed |= rel.pairs_.insert(std::move(p)).second;
  }

  // Endpoint equivalence per logical fragment, closed with union-find.
  std::map<std::string, std::set<std::string>> exposers;
  for (const auto& [iri, e] : catalog.endpoints()) {
    for (const FragmentDef* f : catalog.fragments_of(iri)) exposers[f->logical_key()].insert(iri);
  }
  for (const auto& [key, endpoints] : exposers) {
    std::map<std::string, std::string> parent;
    for (const auto& e : endpoints) parent[e] = e;
    std::function<std::string(const std::string&)> find = [&](const std::string& e) -> std::string {
      const std::string p = parent.at(e);
      if (p == e) return e;
      return parent[e] = find(p);
    };
    for (auto a = endpoints.begin(); a != endpoints.end(); ++a) {
      for (auto b = std::next(a); b != endpoints.end(); ++b) {
        if (!visible("endpoints|" + key, *a + "|" + *b)) continue;
        const std::string ra = find(*a);
        const std::string rb = find(*b);
        if (ra != rb) parent[std::max(ra, rb)] = std::min(ra, rb);
      }
    }
    auto& classes = rel.classes_[key];
    for (const auto& e : endpoints) classes[e] = find(e);
  }
  return rel;
}

}  // namespace fedra
