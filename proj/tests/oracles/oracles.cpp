#include "oracles.hpp"

#include <numeric>

namespace oracle {

namespace {

void expand_observations(std::vector<Outcome>& out, const std::vector<int>& draws, const Q& weight, int n) {
  const int N = static_cast<int>(draws.size());
  std::vector<int> obs;
  std::function<void(const Q&)> rec = [&](const Q& p) {
    if (static_cast<int>(obs.size()) == n) {
      out.push_back({draws, obs, p});
      return;
    }
    // Picking a uniform draw index, so repeated atoms contribute repeatedly.
    for (int i = 0; i < N; ++i) {
      obs.push_back(draws[i]);
      rec(Q(p / N));
      obs.pop_back();
    }
  };
  rec(weight);
}

std::vector<Outcome> merge(const std::vector<Outcome>& raw) {
  std::map<std::pair<std::vector<int>, std::vector<int>>, Q> acc;
  for (const auto& o : raw) acc[{o.draws, o.obs}] += o.prob;
  std::vector<Outcome> out;
  for (const auto& [k, p] : acc) {
    if (p != 0) out.push_back({k.first, k.second, p});
  }
  return out;
}

}  // namespace

std::vector<Outcome> empirical_outcomes(const std::vector<Q>& p0, int N, int n) {
  std::vector<Outcome> raw;
  std::vector<int> draws;
  std::function<void(const Q&)> rec = [&](const Q& w) {
    if (static_cast<int>(draws.size()) == N) {
      expand_observations(raw, draws, w, n);
      return;
    }
    for (int a = 0; a < static_cast<int>(p0.size()); ++a) {
      if (p0[a] == 0) continue;
      draws.push_back(a);
      rec(Q(w * p0[a]));
      draws.pop_back();
    }
  };
  rec(Q(1));
  return merge(raw);
}

std::vector<Outcome> urn_outcomes(const std::vector<Q>& alpha, int N, int n) {
  Q total = 0;
  for (const auto& a : alpha) total += a;
  std::vector<Outcome> raw;
  std::vector<int> draws;
  std::vector<int> seen(alpha.size(), 0);
  std::function<void(const Q&)> rec = [&](const Q& w) {
    if (static_cast<int>(draws.size()) == N) {
      expand_observations(raw, draws, w, n);
      return;
    }
    const Q denom = total + static_cast<long>(draws.size());
    for (int a = 0; a < static_cast<int>(alpha.size()); ++a) {
      const Q num = alpha[a] + seen[a];
      if (num == 0) continue;
      draws.push_back(a);
      ++seen[a];
      rec(Q(w * num / denom));
      --seen[a];
      draws.pop_back();
    }
  };
  rec(Q(1));
  return merge(raw);
}

Q mass(const std::vector<int>& draws, std::uint64_t region) {
  long hits = 0;
  for (const int d : draws) hits += (region >> d) & 1U;
  Q m(hits, static_cast<long>(draws.size()));
  m.canonicalize();
  return m;
}

Law conditional(const std::vector<Outcome>& outcomes, std::uint64_t b1, const Q& z1, std::uint64_t b2,
                const std::vector<int>& x) {
  Law law;
  Q total = 0;
  for (const auto& o : outcomes) {
    if (o.obs != x || mass(o.draws, b1) != z1) continue;
    law[mass(o.draws, b2)] += o.prob;
    total += o.prob;
  }
  if (total == 0) return {};
  for (auto& [v, p] : law) p /= total;
  return law;
}

std::vector<Q> positive_points(const std::vector<Outcome>& outcomes, std::uint64_t b1, const std::vector<int>& x) {
  std::map<Q, Q> acc;
  for (const auto& o : outcomes) {
    if (o.obs == x) acc[mass(o.draws, b1)] += o.prob;
  }
  std::vector<Q> out;
  for (const auto& [z, p] : acc) {
    if (p > 0) out.push_back(z);
  }
  return out;
}

Q observation_probability(const std::vector<Outcome>& outcomes, const std::vector<int>& x) {
  Q p = 0;
  for (const auto& o : outcomes) {
    if (o.obs == x) p += o.prob;
  }
  return p;
}

Q urn_sequence_probability(const std::vector<Q>& alpha, const std::vector<int>& sequence) {
  Q total = 0;
  for (const auto& a : alpha) total += a;
  std::vector<int> seen(alpha.size(), 0);
  Q p = 1;
  for (std::size_t i = 0; i < sequence.size(); ++i) {
    p *= Q(alpha[sequence[i]] + seen[sequence[i]]) / Q(total + static_cast<long>(i));
    ++seen[sequence[i]];
  }
  return p;
}

Q dirichlet_moment(const std::vector<Q>& alpha, const std::vector<int>& exponents) {
  std::vector<int> seq;
  for (std::size_t a = 0; a < exponents.size(); ++a) seq.insert(seq.end(), exponents[a], static_cast<int>(a));
  return urn_sequence_probability(alpha, seq);
}

std::vector<NtrOutcome> ntr_outcomes(const std::vector<Law>& increments, int n) {
  std::vector<NtrOutcome> out;
  std::vector<Q> v;
  std::function<void(const Q&)> rec = [&](const Q& w) {
    if (v.size() == increments.size()) {
      std::vector<Q> cell;
      Q left = 1;
      for (const auto& vj : v) {
        cell.push_back(left * vj);
        left *= 1 - vj;
      }
      cell.push_back(left);
      std::vector<int> obs;
      std::function<void(const Q&)> orec = [&](const Q& p) {
        if (p == 0) return;
        if (static_cast<int>(obs.size()) == n) {
          out.push_back({v, obs, p});
          return;
        }
        for (int c = 0; c < static_cast<int>(cell.size()); ++c) {
          obs.push_back(c);
          orec(Q(p * cell[c]));
          obs.pop_back();
        }
      };
      orec(w);
      return;
    }
    for (const auto& [value, p] : increments[v.size()]) {
      v.push_back(value);
      rec(Q(w * p));
      v.pop_back();
    }
  };
  rec(Q(1));
  return out;
}

Law ntr_posterior_increment(const std::vector<NtrOutcome>& outcomes, std::size_t j, const std::vector<int>& x) {
  Law law;
  Q total = 0;
  for (const auto& o : outcomes) {
    if (o.obs != x) continue;
    law[o.v[j]] += o.prob;
    total += o.prob;
  }
  for (auto& [v, p] : law) p /= total;
  return law;
}

Law ntr_posterior_prefix(const std::vector<NtrOutcome>& outcomes, std::size_t j, const std::vector<int>& x) {
  Law law;
  Q total = 0;
  for (const auto& o : outcomes) {
    if (o.obs != x) continue;
    Q left = 1;
    for (std::size_t l = 0; l <= j; ++l) left *= 1 - o.v[l];
    law[Q(1 - left)] += o.prob;
    total += o.prob;
  }
  for (auto& [v, p] : law) p /= total;
  return law;
}

std::map<std::vector<Q>, Q> chain_conditional(const Law& initial, const std::vector<ChainKernel>& kernels, int j) {
  std::map<std::vector<Q>, Q> law;
  Q total = 0;
  std::vector<Q> path;
  std::function<void(const Q&)> rec = [&](const Q& w) {
    if (path.size() == kernels.size() + 1) {
      const Q hi = j <= static_cast<int>(path.size()) ? path[j - 1] : Q(1);
      const Q lo = j >= 2 ? path[j - 2] : Q(0);
      const Q p = w * (hi - lo);
      if (p == 0) return;
      law[path] += p;
      total += p;
      return;
    }
    const auto& row = kernels[path.size() - 1].at(path.back());
    for (const auto& [z, p] : row) {
      if (p == 0) continue;
      path.push_back(z);
      rec(Q(w * p));
      path.pop_back();
    }
  };
  for (const auto& [z, p] : initial) {
    if (p == 0) continue;
    path = {z};
    rec(p);
  }
  for (auto& [k, p] : law) p /= total;
  return law;
}

}  // namespace oracle
