#include "knapcount/sampler.hpp"

#include "knapcount/convolution.hpp"

#include <algorithm>
#include <bit>
#include <atomic>
#include <cmath>
#include <map>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace knapcount {

std::string to_string(NodeKind k) {
  switch (k) {
    case NodeKind::LeafDp: return "leaf-dp";
    case NodeKind::LeafCc: return "leaf-cc";
    case NodeKind::SmallItems: return "small-items";
    case NodeKind::NChoose1: return "n-choose-1";
    case NodeKind::Merge: return "merge";
    case NodeKind::Round: return "round";
  }
  return "?";
}

// ---------------------------------------------------------------- FastFloat

FastFloat FastFloat::from(const XReal& x) {
  if (x.is_zero()) return {};
  return {x.mantissa_double() / 2.0, x.exponent() + 1};
}

FastFloat FastFloat::from(long double x) {
  if (x <= 0) return {};
  int e = 0;
  const long double fr = std::frexp(x, &e);
  return {static_cast<double>(fr), e};
}

FastFloat operator*(FastFloat a, FastFloat b) {
  if (a.m == 0.0 || b.m == 0.0) return {};
  FastFloat r{a.m * b.m, a.e + b.e};
  if (r.m < 0.5) {
    r.m *= 2.0;
    --r.e;
  }
  return r;
}

namespace {

// m * 2^d for d <= 0; zero below the normal range.
double scaled(double m, std::int64_t d) {
  if (d < -1022) return 0.0;
  return m * std::bit_cast<double>(static_cast<std::uint64_t>(d + 1023) << 52);
}

// Cumulative weights normalized to the largest exponent.
class Cdf {
 public:
  explicit Cdf(std::span<const FastFloat> weights) : cum_(weights.size()) {
    std::int64_t top = 0;
    bool any = false;
    for (const auto& w : weights) {
      if (w.m == 0.0) continue;
      top = any ? std::max(top, w.e) : w.e;
      any = true;
    }
    double acc = 0.0;
    for (std::size_t i = 0; i < weights.size(); ++i) {
      if (any && weights[i].m != 0.0) acc += scaled(weights[i].m, weights[i].e - top);
      cum_[i] = acc;
    }
  }

  // -1 when every weight is zero.
  std::ptrdiff_t draw(Rng& rng) const {
    if (cum_.empty() || cum_.back() <= 0.0) return -1;
    const double r = rng.uniform() * cum_.back();
    auto idx = static_cast<std::ptrdiff_t>(std::upper_bound(cum_.begin(), cum_.end(), r) - cum_.begin());
    if (idx >= static_cast<std::ptrdiff_t>(cum_.size())) idx = static_cast<std::ptrdiff_t>(cum_.size()) - 1;
    while (idx > 0 && cum_[static_cast<std::size_t>(idx)] == cum_[static_cast<std::size_t>(idx) - 1]) --idx;
    return idx;
  }

 private:
  std::vector<double> cum_;
};

}  // namespace

std::ptrdiff_t sample_index(std::span<const FastFloat> weights, Rng& rng) { return Cdf(weights).draw(rng); }

namespace {

long double big_to_ld(const BigInt& v) {
  const std::size_t bits = bit_length(v);
  if (bits <= 64) return static_cast<long double>(big_to_u64(v));
  const BigInt top = v >> static_cast<mp_bitcnt_t>(bits - 64);
  return std::ldexp(static_cast<long double>(big_to_u64(top)), static_cast<int>(bits - 64));
}

XReal xreal_from_ld(long double v) {
  if (v <= 0) return {};
  int e = 0;
  const long double fr = std::frexp(v, &e);
  const auto m = static_cast<std::uint64_t>(std::ldexp(fr, 64));
  return XReal::from_scaled(m, e - 64);
}

std::int64_t checked_i64(const BigInt& v, const char* what) {
  if (!fits_i64(v)) throw std::overflow_error(std::string(what) + " exceeds 62 bits");
  return big_to_i64(v);
}

// Unbiased rounding of weight to a multiple of scale, returned in units.
std::int64_t round_units(const BigInt& weight, const BigInt& scale, Rng& rng) {
  BigInt q, r;
  mpz_fdiv_qr(q.get_mpz_t(), r.get_mpz_t(), weight.get_mpz_t(), scale.get_mpz_t());
  std::int64_t u = checked_i64(q, "rounded weight");
  if (sgn(r) != 0 && rng.below(scale) < r) ++u;
  return u;
}

BigInt max_weight(std::span<const Item> items) {
  BigInt m = 0;
  for (const auto& it : items) {
    if (sgn(it.weight) <= 0) throw std::invalid_argument("item weights must be positive");
    if (it.weight > m) m = it.weight;
  }
  return m;
}

ItemSet sorted_ids(std::span<const Item> items) {
  ItemSet ids;
  for (const auto& it : items) ids.push_back(it.id);
  std::sort(ids.begin(), ids.end());
  return ids;
}

ItemSet set_union(const ItemSet& a, const ItemSet& b) {
  ItemSet out;
  std::set_union(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

double log2_ceil_rounds(double delta) {
  if (!(delta > 0)) return 64;
  return std::max(1.0, std::ceil(std::log2(10.0 / delta)));
}

}  // namespace

// ---------------------------------------------------------------- node

struct Sampler::Node {
  NodeKind kind = NodeKind::LeafDp;
  BigInt scale = 1;
  std::int64_t length = 0;
  BigInt sigma2_x4 = 0;
  double delta = 0.0;
  std::vector<XReal> counts{XReal::from_u64(1)};
  ItemSet items;
  ItemSet tiny;
  std::vector<Sampler> children;
  double failure = 0.0;
  mutable std::atomic<std::uint64_t> overflow{0};

  // Leaves and small items: ids in table order with their units.
  std::vector<std::size_t> ids;
  std::vector<std::int64_t> units;
  std::size_t cap = 0;
  // Leaf-DP cumulative table M(k, x, z) at [z][x][k].
  std::vector<double> table;
  // Exact-weight counts [z][x] and their prefix sums over x.
  std::vector<std::vector<long double>> exact;
  std::vector<std::vector<long double>> prefix;
  int max_rounds = 0;
  // Small items: ids rounded to S.
  std::vector<std::size_t> heavy;
  // n-choose-1.
  std::vector<Candidate> candidates;
  std::vector<std::size_t> by_units;
  std::vector<std::int64_t> sorted_units;
  // Round.
  std::vector<BigInt> thresholds;
  std::vector<std::int64_t> alpha;
  // Merge: left counts and right prefix sums as fast floats.
  std::vector<FastFloat> left_ff;
  std::vector<FastFloat> right_prefix_ff;

  std::size_t tsize() const { return ids.size() + 1; }
  double m_at(std::size_t k, std::int64_t x, std::size_t z) const {
    return table[(z * static_cast<std::size_t>(length + 1) + static_cast<std::size_t>(x)) * tsize() + k];
  }

  void run(std::span<QueryTask* const> tasks) const;
  void run_leaf_dp(QueryTask& t) const;
  void run_leaf_cc(QueryTask& t) const;
  void run_small(QueryTask& t) const;
  void run_nchoose1(QueryTask& t) const;
  void run_round(std::span<QueryTask* const> tasks) const;
  void run_merge(std::span<QueryTask* const> tasks) const;
};

Sampler::Sampler() : node_(std::make_shared<Node>()) {}
Sampler::Sampler(std::shared_ptr<Node> node) : node_(std::move(node)) {}

Sampler Sampler::neutral(const BigInt& scale) {
  auto n = std::make_shared<Node>();
  n->scale = scale;
  return Sampler(std::move(n));
}

NodeKind Sampler::kind() const { return node_->kind; }
const BigInt& Sampler::scale() const { return node_->scale; }
std::int64_t Sampler::length() const { return node_->length; }
const BigInt& Sampler::sigma2_x4() const { return node_->sigma2_x4; }
double Sampler::sigma() const { return std::sqrt(sigma2_x4().get_d() / 4.0); }
double Sampler::delta() const { return node_->delta; }
std::span<const XReal> Sampler::counts() const { return node_->counts; }
const ItemSet& Sampler::items() const { return node_->items; }
const ItemSet& Sampler::tiny_items() const { return node_->tiny; }
bool Sampler::is_neutral() const { return node_->kind == NodeKind::LeafDp && node_->items.empty(); }
std::size_t Sampler::num_children() const { return node_->children.size(); }
const Sampler& Sampler::child(std::size_t i) const { return node_->children.at(i); }
std::span<const std::int64_t> Sampler::rounded_units() const { return node_->units; }
std::span<const BigInt> Sampler::thresholds() const { return node_->thresholds; }
std::span<const std::int64_t> Sampler::alpha() const { return node_->alpha; }
std::size_t Sampler::size_cap() const { return node_->cap; }

std::vector<std::vector<long double>> Sampler::size_weight_counts() const {
  if (node_->kind != NodeKind::LeafDp && node_->kind != NodeKind::LeafCc) {
    throw std::logic_error("size_weight_counts is defined on leaves only");
  }
  return node_->exact;
}

double Sampler::failure_bound() const {
  double f = node_->failure;
  for (const auto& c : node_->children) f += c.failure_bound();
  return f;
}

std::uint64_t Sampler::overflow_events() const {
  std::uint64_t f = node_->overflow.load();
  for (const auto& c : node_->children) f += c.overflow_events();
  return f;
}

// ---------------------------------------------------------------- queries

void Sampler::Node::run(std::span<QueryTask* const> tasks) const {
  switch (kind) {
    case NodeKind::LeafDp:
      for (auto* t : tasks) run_leaf_dp(*t);
      return;
    case NodeKind::LeafCc:
      for (auto* t : tasks) run_leaf_cc(*t);
      return;
    case NodeKind::SmallItems:
      for (auto* t : tasks) run_small(*t);
      return;
    case NodeKind::NChoose1:
      for (auto* t : tasks) run_nchoose1(*t);
      return;
    case NodeKind::Round: run_round(tasks); return;
    case NodeKind::Merge: run_merge(tasks); return;
  }
}

void Sampler::Node::run_leaf_dp(QueryTask& t) const {
  t.result.units = 0;
  if (ids.empty()) return;
  std::int64_t x = std::clamp<std::int64_t>(t.capacity, 0, length);
  const std::size_t n = ids.size();
  std::vector<FastFloat> w(cap + 1);
  for (std::size_t z = 0; z <= cap; ++z) w[z] = FastFloat::from(static_cast<long double>(m_at(n, x, z)));
  const auto zi = sample_index(w, t.rng);
  if (zi < 0) {
    t.ok = false;
    return;
  }
  auto z = static_cast<std::size_t>(zi);
  std::size_t m = n;
  while (z > 0) {
    const double r = t.rng.uniform_open0() * m_at(m, x, z);
    std::size_t lo = 1, hi = m;
    while (lo < hi) {
      const std::size_t mid = (lo + hi) / 2;
      if (m_at(mid, x, z) >= r) hi = mid;
      else lo = mid + 1;
    }
    t.result.items.push_back(ids[lo - 1]);
    t.result.units += units[lo - 1];
    x -= units[lo - 1];
    m = lo - 1;
    --z;
  }
}

void Sampler::Node::run_leaf_cc(QueryTask& t) const {
  t.result.units = 0;
  if (ids.empty()) return;
  const std::int64_t x = std::clamp<std::int64_t>(t.capacity, 0, length);
  const auto xs = static_cast<std::size_t>(x);
  std::vector<FastFloat> w(cap + 1);
  for (std::size_t z = 0; z <= cap; ++z) w[z] = FastFloat::from(prefix[z][xs]);
  const auto zi = sample_index(w, t.rng);
  if (zi < 0) {
    t.ok = false;
    return;
  }
  const auto z = static_cast<std::size_t>(zi);
  if (z == 0) return;
  const long double target = prefix[z][xs];
  const std::uint64_t groups = static_cast<std::uint64_t>(z) * z;
  const std::size_t cols = xs + 1, rows = z + 1;
  std::vector<std::size_t> last_pick;
  std::vector<double> buf;
  std::int64_t last_units = 0;
  bool have_last = false;
  for (int round = 0; round < max_rounds; ++round) {
    // Color the items, keep nonempty groups in color order.
    std::map<std::uint64_t, std::map<std::int64_t, std::vector<std::size_t>>> by_group;
    for (std::size_t i = 0; i < ids.size(); ++i) {
      const std::uint64_t g = t.rng.below(groups);
      if (units[i] <= x) by_group[g][units[i]].push_back(i);
    }
    std::vector<const std::map<std::int64_t, std::vector<std::size_t>>*> hist;
    for (const auto& [g, h] : by_group) hist.push_back(&h);
    const std::size_t ng = hist.size();
    if (ng < z) continue;
    // Level k holds the product of the first k group polynomials as [z0][x0];
    // only rows that can still reach size z are kept.
    const std::size_t plane = rows * cols;
    buf.resize((ng + 1) * plane);
    auto row_lo = [&](std::size_t k) { return z + k > ng ? z + k - ng : std::size_t{0}; };
    auto row_hi = [&](std::size_t k) { return std::min(k, z); };
    auto row = [&](std::size_t k, std::size_t r) -> const double* {
      return r >= row_lo(k) && r <= row_hi(k) ? buf.data() + k * plane + r * cols : nullptr;
    };
    std::fill_n(buf.begin(), cols, 0.0);
    buf[0] = 1.0;
    for (std::size_t k = 0; k < ng; ++k) {
      for (std::size_t r = row_lo(k + 1); r <= row_hi(k + 1); ++r) {
        double* d = buf.data() + (k + 1) * plane + r * cols;
        if (const double* same = row(k, r)) std::copy_n(same, cols, d);
        else std::fill_n(d, cols, 0.0);
        const double* below = r > 0 ? row(k, r - 1) : nullptr;
        if (!below) continue;
        for (const auto& [wu, members] : *hist[k]) {
          const auto cnt = static_cast<double>(members.size());
          const auto ws = static_cast<std::size_t>(wu);
          for (std::size_t x0 = ws; x0 < cols; ++x0) d[x0] += cnt * below[x0 - ws];
        }
      }
    }
    const double* top = row(ng, z);
    long double found = 0.0L;
    std::vector<FastFloat> wx(cols);
    for (std::size_t x0 = 0; x0 < cols; ++x0) {
      found += top[x0];
      wx[x0] = FastFloat::from(static_cast<long double>(top[x0]));
    }
    if (found <= 0.0L) continue;
    auto xc = static_cast<std::size_t>(sample_index(wx, t.rng));
    std::size_t zc = z;
    std::vector<std::size_t> pick;
    std::int64_t pick_units = 0;
    std::vector<FastFloat> opts;
    std::vector<std::int64_t> opt_w;
    for (std::size_t k = ng; k-- > 0;) {
      opts.clear();
      opt_w.clear();
      const double* same = row(k, zc);
      opts.push_back(FastFloat::from(static_cast<long double>(same ? same[xc] : 0.0)));
      opt_w.push_back(-1);
      if (const double* below = zc > 0 ? row(k, zc - 1) : nullptr) {
        for (const auto& [wu, members] : *hist[k]) {
          const auto ws = static_cast<std::size_t>(wu);
          if (ws > xc) continue;
          opts.push_back(FastFloat::from(static_cast<long double>(static_cast<double>(members.size()) * below[xc - ws])));
          opt_w.push_back(wu);
        }
      }
      const auto o = static_cast<std::size_t>(sample_index(opts, t.rng));
      if (opt_w[o] < 0) continue;
      const auto& members = hist[k]->at(opt_w[o]);
      const std::size_t i = members[t.rng.below(members.size())];
      pick.push_back(i);
      pick_units += units[i];
      xc -= static_cast<std::size_t>(opt_w[o]);
      --zc;
    }
    last_pick = pick;
    last_units = pick_units;
    have_last = true;
    if (t.rng.uniform() * target < found) {
      for (const auto i : pick) t.result.items.push_back(ids[i]);
      t.result.units = pick_units;
      return;
    }
  }
  overflow.fetch_add(1);
  if (have_last) {
    for (const auto i : last_pick) t.result.items.push_back(ids[i]);
    t.result.units = last_units;
  }
}

void Sampler::Node::run_small(QueryTask& t) const {
  t.result.units = 0;
  const auto k = static_cast<std::int64_t>(heavy.size());
  const std::int64_t zmax = std::clamp<std::int64_t>(t.capacity, 0, k);
  std::vector<double> lg(static_cast<std::size_t>(zmax + 1));
  double top = -INFINITY;
  for (std::int64_t z = 0; z <= zmax; ++z) {
    lg[static_cast<std::size_t>(z)] = std::lgamma(static_cast<double>(k + 1)) - std::lgamma(static_cast<double>(z + 1)) -
                                      std::lgamma(static_cast<double>(k - z + 1));
    top = std::max(top, lg[static_cast<std::size_t>(z)]);
  }
  std::vector<FastFloat> w(lg.size());
  for (std::size_t z = 0; z < lg.size(); ++z) w[z] = FastFloat::from(static_cast<long double>(std::exp(lg[z] - top)));
  const auto z = static_cast<std::size_t>(sample_index(w, t.rng));
  std::vector<std::size_t> pool(heavy);
  for (std::size_t i = 0; i < z; ++i) {
    const std::size_t j = i + t.rng.below(pool.size() - i);
    std::swap(pool[i], pool[j]);
    t.result.items.push_back(pool[i]);
  }
  t.result.units = static_cast<std::int64_t>(z);
}

void Sampler::Node::run_nchoose1(QueryTask& t) const {
  t.result.units = 0;
  const auto fit = static_cast<std::size_t>(
      std::upper_bound(sorted_units.begin(), sorted_units.end(), t.capacity) - sorted_units.begin());
  if (fit == 0) {
    t.ok = false;
    return;
  }
  const std::size_t c = by_units[t.rng.below(fit)];
  t.result.candidate = c;
  t.result.items.insert(t.result.items.end(), candidates[c].items.begin(), candidates[c].items.end());
  t.result.units = units[c];
}

void Sampler::Node::run_round(std::span<QueryTask* const> tasks) const {
  std::vector<std::int64_t> saved(tasks.size());
  for (std::size_t i = 0; i < tasks.size(); ++i) {
    auto* t = tasks[i];
    saved[i] = t->capacity;
    const std::int64_t y = std::clamp<std::int64_t>(t->capacity, 0, length);
    const auto it = std::upper_bound(alpha.begin(), alpha.end(), y);
    t->capacity = static_cast<std::int64_t>(it - alpha.begin()) - 1;
  }
  children[0].node_->run(tasks);
  for (std::size_t i = 0; i < tasks.size(); ++i) {
    auto* t = tasks[i];
    t->capacity = saved[i];
    if (t->ok) t->result.units = alpha[static_cast<std::size_t>(t->result.units)];
  }
}

void Sampler::Node::run_merge(std::span<QueryTask* const> tasks) const {
  const std::int64_t l1 = children[0].length(), l2 = children[1].length();
  std::map<std::int64_t, std::vector<std::size_t>> by_cap;
  std::vector<std::int64_t> xs(tasks.size()), saved(tasks.size()), w2(tasks.size());
  for (std::size_t i = 0; i < tasks.size(); ++i) {
    saved[i] = tasks[i]->capacity;
    xs[i] = std::clamp<std::int64_t>(tasks[i]->capacity, 0, length);
    by_cap[xs[i]].push_back(i);
  }
  std::vector<QueryTask*> live;
  for (const auto& [x, members] : by_cap) {
    const std::int64_t ymax = std::min(x, l1);
    std::vector<FastFloat> w(static_cast<std::size_t>(ymax + 1));
    for (std::int64_t y = 0; y <= ymax; ++y) {
      w[static_cast<std::size_t>(y)] =
          left_ff[static_cast<std::size_t>(y)] * right_prefix_ff[static_cast<std::size_t>(std::min(x - y, l2))];
    }
    const Cdf cdf(w);
    for (const auto i : members) {
      auto* t = tasks[i];
      const auto y = cdf.draw(t->rng);
      if (y < 0) {
        t->ok = false;
        continue;
      }
      t->capacity = x - y;
      live.push_back(t);
    }
  }
  children[1].node_->run(live);
  std::vector<QueryTask*> next;
  std::map<QueryTask*, std::int64_t> right_units;
  for (auto* t : live) {
    if (!t->ok) continue;
    right_units[t] = t->result.units;
    next.push_back(t);
  }
  for (std::size_t i = 0; i < tasks.size(); ++i) {
    if (right_units.count(tasks[i])) tasks[i]->capacity = xs[i] - right_units[tasks[i]];
  }
  children[0].node_->run(next);
  for (auto* t : next) {
    if (t->ok) t->result.units += right_units[t];
  }
  for (std::size_t i = 0; i < tasks.size(); ++i) tasks[i]->capacity = saved[i];
}

void Sampler::query_batch(std::span<QueryTask> tasks) const {
  std::vector<QueryTask*> ptrs;
  ptrs.reserve(tasks.size());
  for (auto& t : tasks) {
    t.ok = true;
    t.result = {};
    ptrs.push_back(&t);
  }
  node_->run(ptrs);
  for (auto& t : tasks) {
    if (t.ok) std::sort(t.result.items.begin(), t.result.items.end());
  }
}

std::optional<QueryResult> Sampler::query_units(std::int64_t capacity, Rng& rng) const {
  QueryTask t{capacity, std::move(rng), {}, true};
  query_batch(std::span<QueryTask>(&t, 1));
  rng = std::move(t.rng);
  if (!t.ok) return std::nullopt;
  return std::move(t.result);
}

std::optional<QueryResult> Sampler::query(const BigInt& capacity, Rng& rng) const {
  if (sgn(capacity) < 0) return std::nullopt;
  BigInt x = floor_div(capacity, scale());
  if (x > length()) x = length();
  return query_units(big_to_i64(x), rng);
}

// ---------------------------------------------------------------- support

std::vector<SupportElement> Sampler::enumerate_support(std::size_t limit) const {
  const Node& nd = *node_;
  std::vector<SupportElement> out;
  auto bounded = [&](std::size_t count) {
    if (count > limit) throw std::length_error("support larger than the enumeration limit");
  };
  switch (nd.kind) {
    case NodeKind::LeafDp:
    case NodeKind::LeafCc: {
      const std::size_t n = nd.ids.size();
      if (n > 62) throw std::length_error("support larger than the enumeration limit");
      std::size_t total = 0;
      for (std::size_t z = 0; z <= nd.cap; ++z) {
        BigInt c;
        mpz_bin_uiui(c.get_mpz_t(), n, z);
        total += c.get_ui();
        bounded(total);
      }
      for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << n); ++mask) {
        if (static_cast<std::size_t>(std::popcount(mask)) > nd.cap) continue;
        SupportElement e;
        for (std::size_t i = 0; i < n; ++i) {
          if (mask >> i & 1) {
            e.items.push_back(nd.ids[i]);
            e.units += nd.units[i];
          }
        }
        std::sort(e.items.begin(), e.items.end());
        out.push_back(std::move(e));
      }
      return out;
    }
    case NodeKind::SmallItems: {
      const std::size_t n = nd.ids.size();
      if (n > 62) throw std::length_error("support larger than the enumeration limit");
      bounded(std::size_t{1} << n);
      for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << n); ++mask) {
        SupportElement e;
        for (std::size_t i = 0; i < n; ++i) {
          if (mask >> i & 1) {
            e.items.push_back(nd.ids[i]);
            e.units += nd.units[i];
          }
        }
        std::sort(e.items.begin(), e.items.end());
        out.push_back(std::move(e));
      }
      return out;
    }
    case NodeKind::NChoose1: {
      bounded(nd.candidates.size());
      for (std::size_t c = 0; c < nd.candidates.size(); ++c) {
        out.push_back({nd.candidates[c].items, c, nd.units[c]});
      }
      return out;
    }
    case NodeKind::Round: {
      out = nd.children[0].enumerate_support(limit);
      for (auto& e : out) e.units = nd.alpha[static_cast<std::size_t>(e.units)];
      return out;
    }
    case NodeKind::Merge: {
      const auto a = nd.children[0].enumerate_support(limit);
      const auto b = nd.children[1].enumerate_support(limit);
      bounded(a.size() * b.size());
      for (const auto& x : a) {
        for (const auto& y : b) {
          SupportElement e;
          e.items = set_union(x.items, y.items);
          e.candidate = x.candidate ? x.candidate : y.candidate;
          e.units = x.units + y.units;
          out.push_back(std::move(e));
        }
      }
      return out;
    }
  }
  return out;
}

std::string Sampler::describe() const {
  std::ostringstream os;
  auto rec = [&os](const Sampler& s, int depth, auto&& self) -> void {
    os << std::string(static_cast<std::size_t>(2 * depth), ' ') << to_string(s.kind()) << " S=" << s.scale().get_str()
       << " L=" << s.length() << " sigma2=" << s.sigma2_x4().get_d() / 4.0 << " delta=" << s.delta()
       << " items=" << s.items().size() << " tiny=" << s.tiny_items().size() << " failure=" << s.node_->failure
       << " overflow=" << s.node_->overflow.load() << '\n';
    for (const auto& c : s.node_->children) self(c, depth + 1, self);
  };
  rec(*this, 0, rec);
  return os.str();
}

// ---------------------------------------------------------------- builders

namespace {

void round_leaf_items(Sampler::Node& nd, std::span<const Item> items, const BigInt& scale, Rng& rng) {
  for (const auto& it : items) {
    nd.ids.push_back(it.id);
    nd.units.push_back(round_units(it.weight, scale, rng));
  }
  nd.items = sorted_ids(items);
}

// Shared leaf shape: cap, L and sigma^2 from the item set.
void leaf_shape(Sampler::Node& nd, std::span<const Item> items, const BigInt& scale, std::size_t cap) {
  nd.cap = std::min(cap, items.size());
  const BigInt per_item = ceil_div(max_weight(items), scale);
  nd.length = checked_i64(per_item * static_cast<unsigned long>(nd.cap), "leaf length");
  nd.sigma2_x4 = scale * scale * static_cast<unsigned long>(nd.cap);
}

}  // namespace

Sampler leaf_dp_build(std::span<const Item> items, const BigInt& scale, std::size_t cap, double delta, Rng& rng) {
  if (sgn(scale) <= 0 || cap == 0) throw std::invalid_argument("leaf needs S >= 1 and B >= 1");
  if (items.empty()) return Sampler::neutral(scale);
  auto nd = std::make_shared<Sampler::Node>();
  nd->kind = NodeKind::LeafDp;
  nd->scale = scale;
  nd->delta = delta;
  round_leaf_items(*nd, items, scale, rng);
  leaf_shape(*nd, items, scale, cap);
  const std::size_t n = nd->ids.size(), b = nd->cap;
  const auto cols = static_cast<std::size_t>(nd->length + 1);
  std::vector<long double> cur((b + 1) * cols, 0.0L);
  cur[0] = 1.0L;
  nd->table.assign((b + 1) * cols * (n + 1), 0.0);
  auto store = [&](std::size_t k) {
    for (std::size_t z = 0; z <= b; ++z) {
      long double acc = 0.0L;
      for (std::size_t x = 0; x < cols; ++x) {
        acc += cur[z * cols + x];
        nd->table[(z * cols + x) * (n + 1) + k] = static_cast<double>(acc);
      }
    }
  };
  store(0);
  for (std::size_t k = 1; k <= n; ++k) {
    const auto u = static_cast<std::size_t>(nd->units[k - 1]);
    for (std::size_t z = b; z >= 1; --z) {
      for (std::size_t x = cols; x-- > u;) cur[z * cols + x] += cur[(z - 1) * cols + x - u];
    }
    store(k);
  }
  nd->exact.assign(b + 1, std::vector<long double>(cols));
  nd->counts.assign(cols, XReal{});
  for (std::size_t x = 0; x < cols; ++x) {
    long double f = 0.0L;
    for (std::size_t z = 0; z <= b; ++z) {
      nd->exact[z][x] = cur[z * cols + x];
      f += cur[z * cols + x];
    }
    nd->counts[x] = xreal_from_ld(f);
  }
  return Sampler(std::move(nd));
}

std::vector<BigInt> subset_sums_count_mod_p(std::span<const std::int64_t> a, std::int64_t t, const BigInt& p) {
  if (t < 0) throw std::invalid_argument("subset_sums_count_mod_p needs t >= 0");
  if (p <= t) throw std::invalid_argument("subset_sums_count_mod_p needs p > t");
  const auto len = static_cast<std::size_t>(t + 1);
  auto rec = [&](std::size_t lo, std::size_t hi, auto&& self) -> std::vector<BigInt> {
    if (hi - lo == 1) {
      const std::int64_t ai = a[lo];
      if (ai < 1 || ai > t) throw std::invalid_argument("subset_sums_count_mod_p needs 1 <= a_i <= t");
      std::vector<BigInt> poly(static_cast<std::size_t>(ai + 1));
      poly[0] = 1;
      poly[static_cast<std::size_t>(ai)] += 1;
      return poly;
    }
    const std::size_t mid = (lo + hi) / 2;
    const auto left = self(lo, mid, self);
    const auto right = self(mid, hi, self);
    auto prod = conv_exact(left, right);
    if (prod.size() > len) prod.resize(len);
    for (auto& c : prod) mpz_mod(c.get_mpz_t(), c.get_mpz_t(), p.get_mpz_t());
    return prod;
  };
  std::vector<BigInt> g(len);
  if (a.empty()) {
    g[0] = 1 % p;
    return g;
  }
  const auto prod = rec(0, a.size(), rec);
  std::copy(prod.begin(), prod.end(), g.begin());
  return g;
}

Sampler leaf_cc_build(std::span<const Item> items, const BigInt& scale, std::size_t cap, double delta, Rng& rng) {
  if (sgn(scale) <= 0 || cap == 0) throw std::invalid_argument("leaf needs S >= 1 and B >= 1");
  if (items.empty()) return Sampler::neutral(scale);
  auto nd = std::make_shared<Sampler::Node>();
  nd->kind = NodeKind::LeafCc;
  nd->scale = scale;
  nd->delta = delta;
  round_leaf_items(*nd, items, scale, rng);
  leaf_shape(*nd, items, scale, cap);
  const std::int64_t len = nd->length;
  const std::size_t b = nd->cap;
  std::vector<std::int64_t> a;
  for (const auto u : nd->units) a.push_back(u + len + 1);
  const std::int64_t t = static_cast<std::int64_t>(b) * (len + 1) + len;
  BigInt q;
  mpz_ui_pow_ui(q.get_mpz_t(), nd->ids.size(), b);
  if (q <= t) q = t + 1;
  // Random prime in [2Q, 4Q].
  BigInt p;
  do {
    p = 2 * q + rng.below(2 * q + 1);
  } while (mpz_probab_prime_p(p.get_mpz_t(), 50) == 0);
  const auto g = subset_sums_count_mod_p(a, t, p);
  const auto cols = static_cast<std::size_t>(len + 1);
  nd->exact.assign(b + 1, std::vector<long double>(cols));
  nd->prefix.assign(b + 1, std::vector<long double>(cols));
  nd->counts.assign(cols, XReal{});
  std::vector<BigInt> f(cols);
  for (std::size_t z = 0; z <= b; ++z) {
    long double acc = 0.0L;
    for (std::size_t x = 0; x < cols; ++x) {
      const BigInt& m = g[x + z * cols];
      f[x] += m;
      nd->exact[z][x] = big_to_ld(m);
      acc += nd->exact[z][x];
      nd->prefix[z][x] = acc;
    }
  }
  for (std::size_t x = 0; x < cols; ++x) nd->counts[x] = XReal::from_integer(f[x]);
  nd->max_rounds = static_cast<int>(log2_ceil_rounds(delta));
  nd->failure = std::ldexp(1.0, -100);
  return Sampler(std::move(nd));
}

Sampler small_items_build(std::span<const Item> items, const BigInt& scale, double delta, Rng& rng) {
  if (sgn(scale) <= 0) throw std::invalid_argument("small-items sampler needs S >= 1");
  if (items.empty()) return Sampler::neutral(scale);
  if (max_weight(items) > scale) throw std::invalid_argument("small-items sampler needs every weight <= S");
  auto nd = std::make_shared<Sampler::Node>();
  nd->kind = NodeKind::SmallItems;
  nd->scale = scale;
  nd->delta = delta;
  for (const auto& it : items) {
    const bool up = rng.below(scale) < it.weight;
    nd->ids.push_back(it.id);
    nd->units.push_back(up ? 1 : 0);
    (up ? nd->heavy : nd->tiny).push_back(it.id);
  }
  std::sort(nd->tiny.begin(), nd->tiny.end());
  nd->items = sorted_ids(items);
  nd->length = static_cast<std::int64_t>(items.size());
  nd->sigma2_x4 = scale * scale * static_cast<unsigned long>(items.size());
  const std::size_t k = nd->heavy.size();
  nd->counts.assign(items.size() + 1, XReal{});
  const BigInt base = pow2(nd->tiny.size());
  for (std::size_t z = 0; z <= k; ++z) {
    BigInt c;
    mpz_bin_uiui(c.get_mpz_t(), k, z);
    nd->counts[z] = XReal::from_integer(base * c);
  }
  nd->failure = delta;
  return Sampler(std::move(nd));
}

Sampler nchoose1_build(std::span<const Candidate> candidates, const BigInt& scale, Rng& rng) {
  if (candidates.empty()) throw std::invalid_argument("n-choose-1 sampler needs candidates");
  if (sgn(scale) <= 0) throw std::invalid_argument("n-choose-1 sampler needs S >= 1");
  auto nd = std::make_shared<Sampler::Node>();
  nd->kind = NodeKind::NChoose1;
  nd->scale = scale;
  nd->candidates.assign(candidates.begin(), candidates.end());
  for (auto& c : nd->candidates) {
    if (sgn(c.weight) <= 0) throw std::invalid_argument("n-choose-1 candidates need positive weight");
    std::sort(c.items.begin(), c.items.end());
    nd->units.push_back(round_units(c.weight, scale, rng));
    nd->items = set_union(nd->items, c.items);
  }
  nd->length = *std::max_element(nd->units.begin(), nd->units.end());
  nd->counts.assign(static_cast<std::size_t>(nd->length + 1), XReal{});
  std::vector<std::uint64_t> hist(nd->counts.size(), 0);
  for (const auto u : nd->units) ++hist[static_cast<std::size_t>(u)];
  for (std::size_t x = 0; x < hist.size(); ++x) {
    if (hist[x]) nd->counts[x] = XReal::from_u64(hist[x]);
  }
  nd->by_units.resize(nd->candidates.size());
  std::iota(nd->by_units.begin(), nd->by_units.end(), 0);
  std::stable_sort(nd->by_units.begin(), nd->by_units.end(),
                   [&](std::size_t x, std::size_t y) { return nd->units[x] < nd->units[y]; });
  for (const auto c : nd->by_units) nd->sorted_units.push_back(nd->units[c]);
  nd->sigma2_x4 = scale * scale;
  return Sampler(std::move(nd));
}

Sampler round_sampler(const Sampler& child, const BigInt& new_scale, Rng& rng) {
  if (new_scale < child.scale()) throw std::invalid_argument("rounding needs S' >= S");
  if (child.is_neutral()) return Sampler::neutral(new_scale);
  auto nd = std::make_shared<Sampler::Node>();
  nd->kind = NodeKind::Round;
  nd->scale = new_scale;
  nd->delta = child.delta();
  nd->items = child.items();
  nd->tiny = child.tiny_items();
  nd->children.push_back(child);
  const BigInt& s = child.scale();
  const std::int64_t lc = child.length();
  nd->length = checked_i64(ceil_div(s * static_cast<long>(lc), new_scale), "rounded length");
  for (std::int64_t y = 0; y <= nd->length; ++y) {
    nd->thresholds.push_back(new_scale * static_cast<long>(y) + rng.below(new_scale));
  }
  nd->alpha.resize(static_cast<std::size_t>(lc + 1));
  nd->counts.assign(static_cast<std::size_t>(nd->length + 1), XReal{});
  const auto fc = child.counts();
  for (std::int64_t x = 0; x <= lc; ++x) {
    const BigInt v = s * static_cast<long>(x);
    const std::int64_t y = big_to_i64(floor_div(v, new_scale));
    const std::int64_t a = v <= nd->thresholds[static_cast<std::size_t>(y)] ? y : y + 1;
    nd->alpha[static_cast<std::size_t>(x)] = a;
    nd->counts[static_cast<std::size_t>(a)] += fc[static_cast<std::size_t>(x)];
  }
  nd->sigma2_x4 = child.sigma2_x4() + new_scale * new_scale;
  return Sampler(std::move(nd));
}

Sampler merge_samplers(const Sampler& left, const Sampler& right, Rng& rng, std::optional<double> delta_conv) {
  if (left.scale() != right.scale()) throw std::invalid_argument("merging needs equal scales");
  if (!(left.delta() < 0.1) || !(right.delta() < 0.1)) throw std::invalid_argument("merging needs child delta < 1/10");
  if (left.is_neutral()) return right;
  if (right.is_neutral()) return left;
  const double dsum = 4.0 * (left.delta() + right.delta());
  const double dconv = delta_conv.value_or(dsum / 10.0);
  if (!(dconv > 0.0) || !(dconv < 0.25)) throw std::invalid_argument("merging needs 0 < delta_conv < 1/4");
  auto nd = std::make_shared<Sampler::Node>();
  nd->kind = NodeKind::Merge;
  nd->scale = left.scale();
  nd->delta = std::max(dsum, 10.0 * dconv);
  nd->length = left.length() + right.length();
  nd->sigma2_x4 = left.sigma2_x4() + right.sigma2_x4();
  nd->items = set_union(left.items(), right.items());
  nd->tiny = set_union(left.tiny_items(), right.tiny_items());
  nd->children = {left, right};
  nd->counts = sum_approx_conv(left.counts(), right.counts(), dconv, rng);
  nd->failure = nd->delta / 20.0;
  for (const auto& c : left.counts()) nd->left_ff.push_back(FastFloat::from(c));
  for (const auto& c : prefix_sums(right.counts())) nd->right_prefix_ff.push_back(FastFloat::from(c));
  return Sampler(std::move(nd));
}

}  // namespace knapcount

namespace knapcount {

BigInt level_scale(const BigInt& total, int level, double divisor) {
  constexpr mp_bitcnt_t kBits = 256;
  mpf_class denom(divisor, kBits);
  mpf_class root(1, kBits);
  if (level != 0) {
    mpf_class p2(1, kBits);
    mpf_mul_2exp(p2.get_mpf_t(), p2.get_mpf_t(), static_cast<mp_bitcnt_t>(level));
    root = sqrt(p2);
  }
  const mpf_class q = mpf_class(total, kBits) / (denom * root);
  const mpf_class c = ceil(q);
  BigInt out(c);
  if (out < 1) out = 1;
  return out;
}

Sampler build_tree(std::vector<Sampler> leaves, std::span<const BigInt> scales, Rng& rng) {
  if (leaves.empty() || !std::has_single_bit(leaves.size())) throw std::invalid_argument("tree needs 2^H leaves");
  const auto height = static_cast<std::size_t>(std::countr_zero(leaves.size()));
  if (scales.size() != height + 1) throw std::invalid_argument("tree needs one scale per level");
  std::vector<Sampler> level = std::move(leaves);
  for (std::size_t h = height; h-- > 0;) {
    std::vector<Sampler> up(level.size() / 2);
    for (std::size_t i = 0; i < up.size(); ++i) {
      Rng r = rng.split(h, i);
      up[i] = round_sampler(merge_samplers(level[2 * i], level[2 * i + 1], r), scales[h], r);
    }
    level = std::move(up);
  }
  return level.front();
}

}  // namespace knapcount
