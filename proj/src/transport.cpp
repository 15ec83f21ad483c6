// Copyright 2026 The entsum Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


#include "entsum/transport.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <numbers>
#include <optional>
#include <string>

#include "entsum/errors.hpp"
#include "entsum/report.hpp"

namespace entsum {

namespace {

using PairMap = std::map<std::pair<GroupElement, GroupElement>, Rational>;

GroupElement concat(const GroupElement& a, const GroupElement& b) {
  GroupElement out = a;
  out.insert(out.end(), b.begin(), b.end());
  return out;
}

TransportCertificate certificate_from_map(const GroupSpec& g, const PairMap& pairs) {
  std::map<GroupElement, Rational> src, dst;
  std::map<GroupElement, Rational> coupling;
  for (const auto& [xy, m] : pairs) {
    if (m == 0) continue;
    const auto& [x, y] = xy;
    src[x] += m;
    dst[y] += m;
    coupling[concat(x, sub(g, y, x))] += m;
  }
  std::vector<Atom> sa(src.begin(), src.end());
  std::vector<Atom> ta(dst.begin(), dst.end());
  std::vector<JointDist::JointAtom> ca(coupling.begin(), coupling.end());
  TransportCertificate c;
  c.source = Dist::from_atoms(g, std::move(sa));
  c.target = Dist::from_atoms(g, std::move(ta));
  c.coupling = JointDist::from_atoms({g, g}, std::move(ca));
  c.cost = entropy(c.coupling.marginal_dist(1));
  return c;
}

PairMap pairs_of(const TransportCertificate& c) {
  PairMap out;
  const auto& g = c.group();
  for (const auto& [key, m] : c.coupling.atoms()) {
    const auto x = c.coupling.component(key, 0);
    const auto z = c.coupling.component(key, 1);
    out[{GroupElement(x.begin(), x.end()), add(g, x, z)}] += m;
  }
  return out;
}

bool close_to(double a, double b, double tol) { return std::abs(a - b) <= tol * std::max(1.0, std::abs(b)); }

}  // namespace

void verify_certificate(const TransportCertificate& c) {
  const auto& g = c.group();
  if (c.target.group() != g) throw InvariantError("certificate source and target groups differ");
  if (c.coupling.arity() != 2 || c.coupling.group(0) != g || c.coupling.group(1) != g) {
    throw InvariantError("certificate coupling must live on (G, G)");
  }
  if (!dist_equal(c.coupling.marginal_dist(0), c.source)) {
    throw InvariantError("certificate X-marginal differs from the source");
  }
  std::vector<Atom> pushed;
  for (const auto& [key, m] : c.coupling.atoms()) {
    pushed.emplace_back(add(g, c.coupling.component(key, 0), c.coupling.component(key, 1)), m);
  }
  if (!dist_equal(Dist::from_atoms(g, std::move(pushed)), c.target)) {
    throw InvariantError("certificate pushforward differs from the target");
  }
  if (!close_to(c.cost, entropy(c.coupling.marginal_dist(1)), 1e-12)) {
    throw InvariantError("certificate cost differs from Ent(Z)");
  }
  if (!std::isnan(c.bound) && c.cost > c.bound + kEntropyTol) {
    throw InvariantError("certificate cost exceeds its claimed bound");
  }
}

bool certificate_valid(const TransportCertificate& c) {
  try {
    verify_certificate(c);
    return true;
  } catch (const std::exception&) {
    return false;
  }
}

TransportCertificate certificate_from_plan(const GroupSpec& g, const std::vector<PlanAtom>& plan) {
  PairMap pairs;
  for (const auto& a : plan) {
    if (a.mass < 0) throw PreconditionError("negative plan mass");
    pairs[{reduce(g, a.x), reduce(g, a.y)}] += a.mass;
  }
  return certificate_from_map(g, pairs);
}

std::vector<PlanAtom> plan_of(const TransportCertificate& c) {
  std::vector<PlanAtom> out;
  for (auto& [xy, m] : pairs_of(c)) out.push_back({xy.first, xy.second, m});
  return out;
}

TransportCertificate identity_certificate(const Dist& p) {
  PairMap pairs;
  for (const auto& [x, m] : p.atoms()) pairs[{x, x}] = m;
  auto c = certificate_from_map(p.group(), pairs);
  c.bound = 0.0;
  return c;
}

TransportCertificate shift_certificate(const Dist& source, const Dist& shift) {
  if (source.group() != shift.group()) throw IncompatibleGroupError("shift in another group");
  const auto& g = source.group();
  PairMap pairs;
  for (const auto& [x, m] : source.atoms()) {
    for (const auto& [z, w] : shift.atoms()) pairs[{x, add(g, x, z)}] += m * w;
  }
  auto c = certificate_from_map(g, pairs);
  c.bound = entropy(shift);
  return c;
}

TransportCertificate independent_certificate(const Dist& source, const Dist& target) {
  if (source.group() != target.group()) throw IncompatibleGroupError("coupling across groups");
  PairMap pairs;
  for (const auto& [x, m] : source.atoms()) {
    for (const auto& [y, w] : target.atoms()) pairs[{x, y}] += m * w;
  }
  auto c = certificate_from_map(source.group(), pairs);
  c.bound = entropy(convolve(target, source, Sign::kMinus));
  return c;
}

TransportCertificate compose(const TransportCertificate& a, const TransportCertificate& b) {
  if (!dist_equal(a.target, b.source)) {
    throw PreconditionError("composed certificates do not meet in the middle");
  }
  std::map<GroupElement, std::vector<std::pair<GroupElement, Rational>>> into, outof;
  for (auto& [xy, m] : pairs_of(a)) into[xy.second].emplace_back(xy.first, m);
  for (auto& [xy, m] : pairs_of(b)) outof[xy.first].emplace_back(xy.second, m);
  PairMap pairs;
  for (const auto& [w, ins] : into) {
    const Rational pw = a.target.mass(w);
    const auto& outs = outof.at(w);
    for (const auto& [x, m1] : ins) {
      const Rational f = m1 / pw;
      for (const auto& [y, m2] : outs) pairs[{x, y}] += f * m2;
    }
  }
  auto c = certificate_from_map(a.group(), pairs);
  c.bound = a.cost + b.cost;
  return c;
}

TransportCertificate reverse(const TransportCertificate& c) {
  PairMap pairs;
  for (auto& [xy, m] : pairs_of(c)) pairs[{xy.second, xy.first}] = m;
  auto out = certificate_from_map(c.group(), pairs);
  out.bound = c.bound;
  return out;
}

// ---------------------------------------------------------------------------
// Exact oracle.

namespace {

struct TreeSearch {
  std::size_t m, n;
  std::vector<double> supply;  // rows then columns
  std::vector<int> zid;        // per edge
  std::size_t zcount;
  std::size_t need;

  std::vector<std::size_t> parent, rank_;
  std::vector<std::pair<std::size_t, std::size_t>> undo;  // (child root, old rank of parent root)
  std::vector<std::uint8_t> chosen;

  struct Candidate {
    double cost;
    std::array<std::uint8_t, kExactCap> edges;
  };
  std::vector<Candidate> feasible;

  std::size_t find(std::size_t v) const {
    while (parent[v] != v) v = parent[v];
    return v;
  }

  bool unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a == b) return false;
    if (rank_[a] < rank_[b]) std::swap(a, b);
    undo.emplace_back(b, rank_[a]);
    parent[b] = a;
    if (rank_[a] == rank_[b]) ++rank_[a];
    return true;
  }

  void rollback() {
    auto [b, r] = undo.back();
    undo.pop_back();
    const std::size_t a = parent[b];
    parent[b] = b;
    rank_[a] = r;
  }

  // Leaf peeling on the chosen spanning tree; values indexed like `chosen`.
  template <typename T>
  static bool peel(std::size_t m, std::size_t n, const std::vector<T>& supply,
                   const std::vector<std::uint8_t>& edges, std::vector<T>& value) {
    const std::size_t nodes = m + n;
    std::vector<std::vector<std::size_t>> incident(nodes);
    for (std::size_t k = 0; k < edges.size(); ++k) {
      const std::size_t e = edges[k];
      incident[e / n].push_back(k);
      incident[m + e % n].push_back(k);
    }
    std::vector<T> residual = supply;
    std::vector<std::size_t> degree(nodes);
    for (std::size_t v = 0; v < nodes; ++v) degree[v] = incident[v].size();
    std::vector<bool> fixed(edges.size(), false);
    value.assign(edges.size(), T(0));
    std::vector<std::size_t> stack;
    for (std::size_t v = 0; v < nodes; ++v) {
      if (degree[v] == 1) stack.push_back(v);
    }
    std::size_t done = 0;
    while (!stack.empty()) {
      const std::size_t v = stack.back();
      stack.pop_back();
      if (degree[v] != 1) continue;
      std::size_t k = 0;
      for (auto kk : incident[v]) {
        if (!fixed[kk]) k = kk;
      }
      const std::size_t e = edges[k];
      const std::size_t other = (v < m) ? m + e % n : e / n;
      value[k] = residual[v];
      residual[v] -= value[k];
      residual[other] -= value[k];
      fixed[k] = true;
      ++done;
      --degree[v];
      if (--degree[other] == 1) stack.push_back(other);
    }
    return done == edges.size();
  }

  void evaluate() {
    std::vector<double> value;
    peel(m, n, supply, chosen, value);
    std::vector<double> zmass(zcount, 0.0);
    for (std::size_t k = 0; k < chosen.size(); ++k) {
      if (value[k] < -1e-12) return;
      zmass[zid[chosen[k]]] += std::max(value[k], 0.0);
    }
    CompensatedSum h;
    for (double w : zmass) {
      if (w > 0) h.add(-w * std::log(w));
    }
    Candidate c{h.value(), {}};
    std::copy(chosen.begin(), chosen.end(), c.edges.begin());
    feasible.push_back(c);
  }

  void search(std::size_t edge) {
    if (chosen.size() == need) {
      evaluate();
      return;
    }
    const std::size_t total = m * n;
    if (total - edge < need - chosen.size()) return;
    if (unite(edge / n, m + edge % n)) {
      chosen.push_back(static_cast<std::uint8_t>(edge));
      search(edge + 1);
      chosen.pop_back();
      rollback();
    }
    search(edge + 1);
  }
};

}  // namespace

TransportCertificate transport_exact(const Dist& p, const Dist& q, std::size_t cap) {
  if (p.group() != q.group()) throw IncompatibleGroupError("transport across groups");
  const auto& g = p.group();
  const std::size_t m = p.size(), n = q.size();
  cap = std::min(cap, kExactCap);
  if (m * n > cap) {
    throw InstanceTooLargeError("exact transport needs " + std::to_string(m * n) +
                                " variables, above the cap " + std::to_string(cap) +
                                "; use the constructive certificates instead");
  }
  TreeSearch ts;
  ts.m = m;
  ts.n = n;
  ts.need = m + n - 1;
  std::map<GroupElement, int> zindex;
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      auto z = sub(g, q.atoms()[j].first, p.atoms()[i].first);
      auto [it, inserted] = zindex.emplace(std::move(z), static_cast<int>(zindex.size()));
      ts.zid.push_back(it->second);
    }
  }
  ts.zcount = zindex.size();
  for (const auto& [x, w] : p.atoms()) ts.supply.push_back(to_double(w));
  for (const auto& [y, w] : q.atoms()) ts.supply.push_back(to_double(w));
  ts.parent.resize(m + n);
  for (std::size_t v = 0; v < m + n; ++v) ts.parent[v] = v;
  ts.rank_.assign(m + n, 0);
  ts.search(0);

  std::sort(ts.feasible.begin(), ts.feasible.end(),
            [](const auto& a, const auto& b) { return a.cost < b.cost; });

  std::vector<Rational> exact_supply;
  for (const auto& [x, w] : p.atoms()) exact_supply.push_back(w);
  for (const auto& [y, w] : q.atoms()) exact_supply.push_back(w);

  std::optional<TransportCertificate> best;
  double best_float = 0.0;
  for (const auto& cand : ts.feasible) {
    if (best && cand.cost > best_float + 1e-9) break;
    std::vector<std::uint8_t> edges(cand.edges.begin(), cand.edges.begin() + ts.need);
    std::vector<Rational> value;
    TreeSearch::peel(m, n, exact_supply, edges, value);
    if (std::any_of(value.begin(), value.end(), [](const Rational& v) { return v < 0; })) continue;
    PairMap pairs;
    for (std::size_t k = 0; k < edges.size(); ++k) {
      if (value[k] == 0) continue;
      pairs[{p.atoms()[edges[k] / n].first, q.atoms()[edges[k] % n].first}] += value[k];
    }
    auto c = certificate_from_map(g, pairs);
    if (!best || c.cost < best->cost) {
      if (!best) best_float = cand.cost;
      best = std::move(c);
    }
  }
  if (!best) throw InvariantError("transportation polytope has no feasible vertex");
  best->bound = best->cost;
  return *best;
}

double transport_cost_exact(const Dist& p, const Dist& q, std::size_t cap) {
  return transport_exact(p, q, cap).cost;
}

TransportCertificate transport_split(
    const std::vector<std::pair<Rational, TransportCertificate>>& pieces, double selector_entropy) {
  if (pieces.empty()) throw PreconditionError("split needs at least one piece");
  const GroupSpec g = pieces.front().second.group();
  Rational total = 0;
  std::vector<Atom> selector;
  double bound = selector_entropy;
  PairMap pairs;
  for (std::size_t s = 0; s < pieces.size(); ++s) {
    const auto& [w, cert] = pieces[s];
    if (w <= 0) throw PreconditionError("split weights must be positive");
    if (cert.group() != g) throw IncompatibleGroupError("split pieces live in different groups");
    if (!certificate_valid(cert)) throw PreconditionError("split piece has inconsistent marginals");
    total += w;
    selector.emplace_back(GroupElement{static_cast<std::int64_t>(s)}, w);
    bound += to_double(w) * cert.cost;
    for (auto& [xy, m] : pairs_of(cert)) pairs[xy] += w * m;
  }
  if (total != 1) throw PreconditionError("split weights must sum to one");
  const double h_s = entropy(Dist::from_atoms(GroupSpec::integers(1), std::move(selector)));
  if (selector_entropy < h_s - kEntropyTol) {
    throw PreconditionError("selector entropy below the entropy of the weights");
  }
  auto c = certificate_from_map(g, pairs);
  c.bound = bound;
  verify_certificate(c);
  return c;
}

// ---------------------------------------------------------------------------
// Dense exact plans on an explicit finite group.

namespace {

class FiniteGroup {
 public:
  FiniteGroup(GroupSpec spec, std::vector<GroupElement> elems) : spec_(std::move(spec)) {
    std::sort(elems.begin(), elems.end());
    elems.erase(std::unique(elems.begin(), elems.end()), elems.end());
    elems_ = std::move(elems);
    n_ = elems_.size();
    for (std::size_t i = 0; i < n_; ++i) index_.emplace(elems_[i], i);
    add_.resize(n_ * n_);
    neg_.resize(n_);
    for (std::size_t i = 0; i < n_; ++i) {
      neg_[i] = index_of(neg(spec_, elems_[i]));
      for (std::size_t j = 0; j < n_; ++j) add_[i * n_ + j] = index_of(add(spec_, elems_[i], elems_[j]));
    }
    zero_ = index_of(zero(spec_));
  }

  std::size_t order() const noexcept { return n_; }
  std::size_t plus(std::size_t a, std::size_t b) const { return add_[a * n_ + b]; }
  std::size_t minus(std::size_t a, std::size_t b) const { return add_[a * n_ + neg_[b]]; }
  std::size_t zero_index() const noexcept { return zero_; }
  const GroupSpec& spec() const noexcept { return spec_; }
  const GroupElement& element(std::size_t i) const { return elems_[i]; }

  std::size_t index_of(const GroupElement& e) const {
    auto it = index_.find(e);
    if (it == index_.end()) throw InvariantError("element outside the finite group: " + to_string(e));
    return it->second;
  }

 private:
  GroupSpec spec_;
  std::vector<GroupElement> elems_;
  std::map<GroupElement, std::size_t> index_;
  std::vector<std::size_t> add_, neg_;
  std::size_t n_ = 0, zero_ = 0;
};

using Vec = std::vector<Rational>;

class Plan {
 public:
  explicit Plan(std::size_t n) : n_(n), m_(n * n) {}
  std::size_t n() const noexcept { return n_; }
  Rational& at(std::size_t x, std::size_t y) { return m_[x * n_ + y]; }
  const Rational& at(std::size_t x, std::size_t y) const { return m_[x * n_ + y]; }

  Vec rows() const {
    Vec out(n_);
    for (std::size_t x = 0; x < n_; ++x)
      for (std::size_t y = 0; y < n_; ++y) out[x] += at(x, y);
    return out;
  }
  Vec cols() const {
    Vec out(n_);
    for (std::size_t x = 0; x < n_; ++x)
      for (std::size_t y = 0; y < n_; ++y) out[y] += at(x, y);
    return out;
  }

 private:
  std::size_t n_;
  std::vector<Rational> m_;
};

Plan transpose(const Plan& a) {
  Plan out(a.n());
  for (std::size_t x = 0; x < a.n(); ++x)
    for (std::size_t y = 0; y < a.n(); ++y) out.at(y, x) = a.at(x, y);
  return out;
}

Plan compose(const Plan& a, const Plan& b) {
  const std::size_t n = a.n();
  const Vec mid = a.cols();
  std::vector<std::vector<std::size_t>> b_rows(n);
  for (std::size_t w = 0; w < n; ++w)
    for (std::size_t y = 0; y < n; ++y)
      if (b.at(w, y) != 0) b_rows[w].push_back(y);
  Vec inv(n);
  for (std::size_t w = 0; w < n; ++w)
    if (mid[w] != 0) inv[w] = 1 / mid[w];
  Plan out(n);
  Rational f, t;
  for (std::size_t x = 0; x < n; ++x) {
    for (std::size_t w = 0; w < n; ++w) {
      if (a.at(x, w) == 0) continue;
      mpq_mul(f.get_mpq_t(), a.at(x, w).get_mpq_t(), inv[w].get_mpq_t());
      for (auto y : b_rows[w]) {
        mpq_mul(t.get_mpq_t(), f.get_mpq_t(), b.at(w, y).get_mpq_t());
        mpq_add(out.at(x, y).get_mpq_t(), out.at(x, y).get_mpq_t(), t.get_mpq_t());
      }
    }
  }
  return out;
}

void add_scaled(Plan& dst, const Plan& src, const Rational& w) {
  for (std::size_t x = 0; x < dst.n(); ++x)
    for (std::size_t y = 0; y < dst.n(); ++y)
      if (src.at(x, y) != 0) dst.at(x, y) += w * src.at(x, y);
}

Plan identity_plan(const Vec& q) {
  Plan out(q.size());
  for (std::size_t x = 0; x < q.size(); ++x) out.at(x, x) = q[x];
  return out;
}

Plan outer(const Vec& a, const Vec& b) {
  Plan out(a.size());
  for (std::size_t x = 0; x < a.size(); ++x) {
    if (a[x] == 0) continue;
    for (std::size_t y = 0; y < b.size(); ++y) out.at(x, y) = a[x] * b[y];
  }
  return out;
}

// pi(x, x + z) = q(x) w(z)
Plan shift_plan(const FiniteGroup& g, const Vec& q, const Vec& w) {
  Plan out(g.order());
  for (std::size_t x = 0; x < q.size(); ++x) {
    if (q[x] == 0) continue;
    for (std::size_t z = 0; z < w.size(); ++z) {
      if (w[z] != 0) out.at(x, g.plus(x, z)) += q[x] * w[z];
    }
  }
  return out;
}

Rational sq_dist_uniform(const Vec& q) {
  const Rational u(1, static_cast<unsigned long>(q.size()));
  Rational s = 0, d;
  for (const auto& v : q) {
    d = v - u;
    s += d * d;
  }
  return s;
}

bool is_uniform(const Vec& q) {
  const Rational u(1, static_cast<unsigned long>(q.size()));
  return std::all_of(q.begin(), q.end(), [&](const Rational& v) { return v == u; });
}

struct DenseFlatten {
  Vec result;
  Vec shift_law;
  std::vector<std::size_t> shifts;
  std::vector<Rational> squared;
};

// Runs at most max_rounds rounds, stopping once the squared distance to
// uniform is zero or at most `target`.
DenseFlatten flatten_dense(const FiniteGroup& g, const Vec& q, int max_rounds,
                           const std::optional<Rational>& target) {
  const std::size_t n = g.order();
  DenseFlatten out;
  out.result = q;
  out.shift_law.assign(n, Rational(0));
  out.shift_law[g.zero_index()] = 1;
  out.squared.push_back(sq_dist_uniform(q));
  Rational a, best;
  for (int round = 0; round < max_rounds; ++round) {
    const Rational& cur = out.squared.back();
    if (cur == 0 || (target && cur <= *target)) break;
    std::size_t best_h = 0;
    for (std::size_t h = 0; h < n; ++h) {
      a = 0;
      for (std::size_t x = 0; x < n; ++x) {
        if (out.result[x] != 0) a += out.result[x] * out.result[g.minus(x, h)];
      }
      if (h == 0 || a < best) {
        best = a;
        best_h = h;
      }
    }
    Vec next(n), law(n);
    for (std::size_t x = 0; x < n; ++x) {
      next[x] = (out.result[x] + out.result[g.minus(x, best_h)]) / 2;
      law[x] = (out.shift_law[x] + out.shift_law[g.minus(x, best_h)]) / 2;
    }
    Rational sq = sq_dist_uniform(next);
    if (2 * sq > cur) throw InvariantError("flattening round failed to halve the squared distance");
    out.result = std::move(next);
    out.shift_law = std::move(law);
    out.shifts.push_back(best_h);
    out.squared.push_back(std::move(sq));
  }
  return out;
}

constexpr int kUnboundedRounds = 4096;

class Uniformiser {
 public:
  Uniformiser(const FiniteGroup& g, const UniformiseOptions& opts, UniformiseStats& stats)
      : g_(g), opts_(opts), stats_(stats), target_(1, static_cast<unsigned long>(g.order())) {}

  // Plan from p to the uniform law.
  Plan run(const Vec& p) {
    if (is_uniform(p)) return identity_plan(p);
    const std::size_t n = g_.order();
    const BigInt size(static_cast<unsigned long>(n));

    // Density levels: A_0 holds p(x)|G| < 2, A_k holds 2^{2^{k-1}} <= p(x)|G| < 2^{2^k}.
    std::map<std::size_t, std::vector<std::size_t>> levels;
    for (std::size_t x = 0; x < n; ++x) levels[level_of(p[x] * size)].push_back(x);

    Plan level_plan(n);
    Vec q(n);
    for (const auto& [k, members] : levels) {
      if (k == 0) {
        for (auto x : members) {
          level_plan.at(x, x) = p[x];
          q[x] += p[x];
        }
        continue;
      }
      Rational mass = 0;
      for (auto x : members) mass += p[x];
      Vec cond(n);
      for (auto x : members) cond[x] = p[x] / mass;
      auto fl = flatten_until_bounded(cond);
      add_scaled(level_plan, shift_plan(g_, cond, fl.shift_law), mass);
      for (std::size_t x = 0; x < n; ++x) q[x] += mass * fl.result[x];
    }

    auto fl = flatten_until_bounded(q);
    Plan bounded = compose(level_plan, shift_plan(g_, q, fl.shift_law));
    return compose(bounded, from_bounded(fl.result, Rational(1)));
  }

 private:
  static std::size_t level_of(const Rational& scaled) {
    if (scaled < 2) return 0;
    std::size_t k = 1;
    BigInt bound;
    while (true) {
      mpz_ui_pow_ui(bound.get_mpz_t(), 2, 1UL << k);
      if (scaled < bound) return k;
      ++k;
    }
  }

  DenseFlatten flatten_until_bounded(const Vec& q) {
    auto fl = flatten_dense(g_, q, kUnboundedRounds, target_);
    stats_.flatten_rounds += static_cast<int>(fl.shifts.size());
    return fl;
  }

  // Plan from r (with ||r - u||^2 <= 1/|G|) to u.  `weight` is the product
  // of the split masses above this call.
  Plan from_bounded(const Vec& r, const Rational& weight) {
    const std::size_t n = g_.order();
    auto fl = flatten_dense(g_, r, opts_.split_rounds, std::nullopt);
    stats_.flatten_rounds += static_cast<int>(fl.shifts.size());
    Plan head = shift_plan(g_, r, fl.shift_law);
    const Vec& q = fl.result;
    if (is_uniform(q)) return head;

    const Rational u(1, static_cast<unsigned long>(n));
    Rational sigma = 0;
    Vec common(n), plus(n), minus(n);
    for (std::size_t x = 0; x < n; ++x) {
      if (q[x] > u) {
        sigma += q[x] - u;
        plus[x] = q[x] - u;
        common[x] = u;
      } else {
        minus[x] = u - q[x];
        common[x] = q[x];
      }
    }
    for (std::size_t x = 0; x < n; ++x) {
      plus[x] /= sigma;
      minus[x] /= sigma;
    }
    ++stats_.splits;

    Plan split = identity_plan(common);
    const Rational inner_weight = weight * sigma;
    if (inner_weight <= opts_.sigma_min) {
      ++stats_.base_cases;
      add_scaled(split, outer(plus, minus), sigma);
    } else {
      auto fp = flatten_until_bounded(plus);
      auto fm = flatten_until_bounded(minus);
      Plan inner = compose(shift_plan(g_, plus, fp.shift_law), from_bounded(fp.result, inner_weight));
      inner = compose(inner, transpose(from_bounded(fm.result, inner_weight)));
      inner = compose(inner, transpose(shift_plan(g_, minus, fm.shift_law)));
      add_scaled(split, inner, sigma);
    }
    return compose(head, split);
  }

  const FiniteGroup& g_;
  const UniformiseOptions& opts_;
  UniformiseStats& stats_;
  Rational target_;
};

Vec dense_of(const FiniteGroup& g, const Dist& p) {
  Vec out(g.order());
  for (const auto& [x, m] : p.atoms()) out[g.index_of(x)] = m;
  return out;
}

Dist dist_of(const FiniteGroup& g, const Vec& v) {
  std::vector<Atom> atoms;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (v[i] != 0) atoms.emplace_back(g.element(i), v[i]);
  }
  return Dist::from_atoms(g.spec(), std::move(atoms));
}

PairMap pairs_of_plan(const FiniteGroup& g, const Plan& plan) {
  PairMap out;
  for (std::size_t x = 0; x < plan.n(); ++x)
    for (std::size_t y = 0; y < plan.n(); ++y)
      if (plan.at(x, y) != 0) out[{g.element(x), g.element(y)}] = plan.at(x, y);
  return out;
}

double effective_log_k(double k) { return std::log(std::max(k, 10.0)); }

void check_order(std::size_t n, const UniformiseOptions& opts) {
  if (n > opts.max_order) {
    throw InstanceTooLargeError("dense uniformisation limited to groups of order " +
                                std::to_string(opts.max_order) + ", got " + std::to_string(n));
  }
}

}  // namespace

FlattenResult flatten(const Dist& p, int k) {
  const auto& spec = p.group();
  if (!spec.finite()) throw PreconditionError("flattening needs a finite group");
  if (k < 0) throw PreconditionError("negative round count");
  FiniteGroup g(spec, enumerate_elements(spec));
  auto fl = flatten_dense(g, dense_of(g, p), k, std::nullopt);

  FlattenResult out;
  out.result = dist_of(g, fl.result);
  for (auto h : fl.shifts) out.trace.shifts.push_back(g.element(h));
  for (const auto& s : fl.squared) out.trace.norms.push_back(std::sqrt(to_double(s)));
  out.trace.squared_norms = fl.squared;
  out.certificate = shift_certificate(p, dist_of(g, fl.shift_law));
  out.certificate.bound = static_cast<double>(fl.shifts.size()) * std::numbers::ln2;
  verify_certificate(out.certificate);
  return out;
}

TransportCertificate uniformise_group(const Dist& p, double k, const UniformiseOptions& opts,
                                      UniformiseStats* stats) {
  const auto& spec = p.group();
  if (!spec.finite()) throw PreconditionError("uniformisation needs a finite group");
  const auto n = static_cast<std::size_t>(spec.order());
  check_order(n, opts);
  if (entropy(p) < std::log(static_cast<double>(n)) - effective_log_k(k) - kEntropyTol) {
    throw PreconditionError("entropy below log|G| - log K");
  }
  UniformiseStats local;
  FiniteGroup g(spec, enumerate_elements(spec));
  Uniformiser u(g, opts, stats ? *stats : local);
  const Plan plan = u.run(dense_of(g, p));
  auto c = certificate_from_map(spec, pairs_of_plan(g, plan));
  verify_certificate(c);
  if (!dist_equal(c.target, Dist::uniform(spec, enumerate_elements(spec)))) {
    throw InvariantError("uniformisation did not reach the uniform law");
  }
  return c;
}

TransportCertificate uniformise_coset_progression(const Dist& p, const CosetProgression& cp,
                                                  double k, const UniformiseOptions& opts,
                                                  UniformiseStats* stats) {
  if (p.group() != cp.group) throw IncompatibleGroupError("distribution and progression differ in group");
  const BoxEmbedding emb = box_embedding(cp, /*proper_required=*/true);
  const Dist target = uniform_on(cp);
  if (entropy(p) < std::log(static_cast<double>(target.size())) - effective_log_k(k) - kEntropyTol) {
    throw PreconditionError("entropy below log|H+P| - log K");
  }
  const Dist lifted = emb.pullback(p);
  if (dist_equal(lifted, emb.pullback(target))) return identity_certificate(p);

  // H x prod Z/2N_i, coordinates as in the box.
  const std::size_t r = cp.group.rank();
  auto moduli = cp.group.moduli();
  std::size_t order = cp.subgroup.size();
  for (auto len : cp.lengths) {
    moduli.push_back(checked_mul(2, len));
    order *= static_cast<std::size_t>(2 * len);
  }
  check_order(order, opts);
  const GroupSpec torus(moduli);
  std::vector<GroupElement> elems;
  elems.reserve(order);
  for (const auto& h : cp.subgroup) {
    GroupElement cur = h;
    cur.resize(r + cp.rank(), 0);
    while (true) {
      elems.push_back(cur);
      std::size_t i = cp.rank();
      while (i-- > 0) {
        if (++cur[r + i] < moduli[r + i]) break;
        cur[r + i] = 0;
      }
      if (i == static_cast<std::size_t>(-1)) break;
    }
  }
  FiniteGroup g(torus, std::move(elems));

  Vec source(g.order()), uniform_box(g.order());
  for (const auto& [b, m] : lifted.atoms()) source[g.index_of(b)] = m;
  const Rational ub(1, static_cast<unsigned long>(emb.box_points().size()));
  for (const auto& b : emb.box_points()) uniform_box[g.index_of(b)] = ub;

  UniformiseStats local;
  Uniformiser u(g, opts, stats ? *stats : local);
  const Plan plan = compose(u.run(source), transpose(u.run(uniform_box)));

  PairMap pairs;
  for (std::size_t x = 0; x < g.order(); ++x) {
    for (std::size_t y = 0; y < g.order(); ++y) {
      if (plan.at(x, y) == 0) continue;
      const auto& bx = g.element(x);
      const auto& by = g.element(y);
      const auto& bz = g.element(g.minus(y, x));
      for (std::size_t i = 0; i < cp.rank(); ++i) {
        const std::int64_t len = cp.lengths[i];
        const std::int64_t v = bz[r + i];
        if (v == len) throw InvariantError("shift of half the torus length: wraparound");
        const std::int64_t lift = v < len ? v : v - 2 * len;
        const std::int64_t landed = bx[r + i] + lift;
        if (bx[r + i] >= len || landed < 0 || landed >= len || landed != by[r + i]) {
          throw InvariantError("transport shift wraps around the box");
        }
      }
      pairs[{emb.forward(bx), emb.forward(by)}] += plan.at(x, y);
    }
  }
  auto c = certificate_from_map(cp.group, pairs);
  verify_certificate(c);
  if (!dist_equal(c.source, p) || !dist_equal(c.target, target)) {
    throw InvariantError("pushed certificate has the wrong marginals");
  }
  return c;
}

}  // namespace entsum
