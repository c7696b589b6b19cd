// Copyright 2026 The trajrisk Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "trajrisk/metrics.hpp"

#include <algorithm>
#include <cmath>

#include "trajrisk/error.hpp"

namespace trajrisk {
namespace {

// Everything derivable from a match table, keyed by AreaRef. Floating-point
// sums run over a sorted destination support so results are independent of
// trajectory order and hash-map iteration order.
struct RefStats {
  std::unordered_map<AreaRef, std::uint64_t> k;
  // pair_count[origin][dest] over trajectories with both ends located,
  // self-loops included regardless of the drop option.
  std::unordered_map<AreaRef, std::unordered_map<AreaRef, std::uint64_t>> pair_count;
  std::unordered_map<AreaRef, std::uint64_t> l;
  std::unordered_map<AreaRef, std::uint64_t> matched;
  std::unordered_map<AreaRef, double> t;
  std::uint64_t contributing_total = 0;
};

RefStats compute_ref_stats(const MatchTable& mt) {
  RefStats st;
  for (const auto& [ref, members] : mt.members) st.k[ref] = members.size();

  const std::size_t n = mt.origin_area.size();
  std::unordered_map<AreaRef, std::uint64_t> population;  // P, unnormalized
  for (std::size_t i = 0; i < n; ++i) {
    if (!mt.origin_area[i] || !mt.dest_area[i]) continue;
    const AreaRef oa = *mt.origin_area[i];
    const AreaRef da = *mt.dest_area[i];
    ++st.pair_count[oa][da];
    if (mt.self_loops_dropped && oa == da) continue;
    ++population[da];
    ++st.contributing_total;
  }

  for (const auto& [oa, dests] : st.pair_count) {
    std::uint64_t distinct = 0;
    std::uint64_t total = 0;
    for (const auto& [da, cnt] : dests) {
      if (mt.self_loops_dropped && da == oa) continue;
      ++distinct;
      total += cnt;
    }
    st.l[oa] = distinct;
    st.matched[oa] = total;
  }
  // Origin areas whose members all lack destinations still have l = 0.
  for (const auto& [ref, cnt] : st.k) {
    (void)cnt;
    if (!st.l.count(ref)) {
      st.l[ref] = 0;
      st.matched[ref] = 0;
    }
  }

  if (st.contributing_total == 0) return st;
  std::vector<std::pair<AreaRef, std::uint64_t>> p_sorted(population.begin(),
                                                          population.end());
  std::sort(p_sorted.begin(), p_sorted.end());
  const double inv_n = 1.0 / static_cast<double>(st.contributing_total);

  for (const auto& [oa, dests] : st.pair_count) {
    const std::uint64_t na = st.matched[oa];
    if (na == 0) continue;  // t undefined: no destination evidence
    const double inv_na = 1.0 / static_cast<double>(na);
    double sum = 0.0;
    for (const auto& [da, pcnt] : p_sorted) {
      std::uint64_t qcnt = 0;
      auto it = dests.find(da);
      if (it != dests.end() && !(mt.self_loops_dropped && da == oa)) {
        qcnt = it->second;
      }
      sum += std::abs(static_cast<double>(qcnt) * inv_na -
                      static_cast<double>(pcnt) * inv_n);
    }
    st.t[oa] = 0.5 * sum;
  }
  return st;
}

// Sorted string-keyed map; enumerable sets get every area seeded with a
// default so empty areas are visible in reports.
template <typename T>
std::map<std::string, T> materialize(const AreaSet& areas,
                                     const std::unordered_map<AreaRef, T>& by_ref,
                                     bool seed_all, T default_value = T{}) {
  std::map<std::string, T> out;
  if (seed_all && areas.enumerable()) {
    for (AreaRef ref = 0; ref < areas.area_count(); ++ref) {
      out.emplace(areas.area_id(ref), default_value);
    }
  }
  for (const auto& [ref, value] : by_ref) {
    out[areas.area_id(ref)] = value;
  }
  return out;
}

}  // namespace

MatchTable build_match_table(const Dataset& dataset, const AreaSet& areas,
                             bool drop_self_loops) {
  if (dataset.trajectories.size() > 0xFFFFFFFFull) {
    throw Error("dataset too large for match table");
  }
  MatchTable mt;
  mt.dataset = &dataset;
  mt.areas = &areas;
  mt.self_loops_dropped = drop_self_loops;
  const std::uint32_t n = static_cast<std::uint32_t>(dataset.trajectories.size());
  mt.origin_area.resize(n);
  mt.dest_area.resize(n);
  for (std::uint32_t i = 0; i < n; ++i) {
    const Trajectory& traj = dataset.trajectories[i];
    const Record& qi = traj.qi();
    const Record& sa = traj.sa();
    mt.origin_area[i] = areas.locate(qi.t, qi.pos);
    mt.dest_area[i] = areas.locate(sa.t, sa.pos);
    if (mt.origin_area[i]) {
      mt.members[*mt.origin_area[i]].push_back(i);
    } else {
      ++mt.unmatched_origin;
    }
    if (!mt.dest_area[i]) ++mt.unmatched_dest;
  }
  return mt;
}

std::map<std::string, std::uint64_t> k_anonymity(const MatchTable& table) {
  std::unordered_map<AreaRef, std::uint64_t> k;
  for (const auto& [ref, members] : table.members) k[ref] = members.size();
  return materialize(*table.areas, k, /*seed_all=*/true);
}

std::map<std::string, std::uint64_t> l_diversity(const MatchTable& table) {
  RefStats st = compute_ref_stats(table);
  return materialize(*table.areas, st.l, /*seed_all=*/true);
}

std::map<std::string, std::uint64_t> strict_k(const Dataset& dataset,
                                              const AreaSet& areas) {
  MatchTable mt = build_match_table(dataset, areas, /*drop_self_loops=*/false);
  RefStats st = compute_ref_stats(mt);
  std::map<std::string, std::uint64_t> out;
  for (std::uint32_t i = 0; i < mt.origin_area.size(); ++i) {
    if (!mt.origin_area[i] || !mt.dest_area[i]) continue;
    const std::uint64_t pair_size =
        st.pair_count[*mt.origin_area[i]][*mt.dest_area[i]];
    out[dataset.trajectories[i].id] = pair_size - 1;
  }
  return out;
}

TClosenessResult t_closeness(const MatchTable& table) {
  RefStats st = compute_ref_stats(table);
  TClosenessResult out;
  out.per_area = materialize(*table.areas, st.t, /*seed_all=*/false);
  for (const auto& [id, value] : out.per_area) {
    (void)id;
    if (!out.t_max || value > *out.t_max) out.t_max = value;
  }
  return out;
}

Staircase make_staircase(std::vector<double> scores) {
  if (scores.empty()) throw Error("staircase needs at least one score");
  std::sort(scores.begin(), scores.end());
  Staircase sc;
  sc.sample_count = scores.size();
  const double n = static_cast<double>(scores.size());
  for (std::size_t i = 0; i < scores.size(); ++i) {
    if (i > 0 && scores[i] == scores[i - 1]) continue;
    sc.points.push_back({static_cast<double>(i) / n, scores[i]});
  }
  return sc;
}

ScoreResult score_area_set(const Dataset& dataset, const AreaSet& areas,
                           const ScoreOptions& options) {
  MatchTable mt = build_match_table(dataset, areas, options.drop_self_loops);
  RefStats st = compute_ref_stats(mt);

  ScoreResult result;
  result.unmatched_origin = mt.unmatched_origin;
  result.unmatched_dest = mt.unmatched_dest;

  if (areas.enumerable()) {
    for (AreaRef ref = 0; ref < areas.area_count(); ++ref) {
      result.areas.emplace(areas.area_id(ref), AreaScores{});
    }
  }
  for (const auto& [ref, k] : st.k) {
    AreaScores& a = result.areas[areas.area_id(ref)];
    a.k = k;
    a.l = st.l[ref];
    a.matched_count = st.matched[ref];
    auto it = st.t.find(ref);
    if (it != st.t.end()) a.t = it->second;
  }
  for (const auto& [id, scores] : result.areas) {
    (void)id;
    if (scores.t && (!result.t_max || *scores.t > *result.t_max)) {
      result.t_max = *scores.t;
    }
  }

  std::vector<double> k_scores, l_scores, strict_scores, t_scores;
  for (std::uint32_t i = 0; i < mt.origin_area.size(); ++i) {
    TrajectoryScores ts;
    if (mt.origin_area[i]) {
      const AreaRef oa = *mt.origin_area[i];
      ts.k_origin = st.k[oa];
      ts.l_origin = st.l[oa];
      auto it = st.t.find(oa);
      if (it != st.t.end()) ts.t_origin = it->second;
      if (mt.dest_area[i]) {
        ts.strict_k = st.pair_count[oa][*mt.dest_area[i]] - 1;
      }
      k_scores.push_back(static_cast<double>(*ts.k_origin));
      l_scores.push_back(static_cast<double>(*ts.l_origin));
      if (ts.strict_k) strict_scores.push_back(static_cast<double>(*ts.strict_k));
      if (ts.t_origin) t_scores.push_back(*ts.t_origin);
    }
    result.trajectories.emplace(dataset.trajectories[i].id, ts);
  }

  auto put_staircase = [&](const char* name, std::vector<double>& scores) {
    result.staircases.emplace(
        name, scores.empty() ? Staircase{} : make_staircase(std::move(scores)));
  };
  put_staircase("k", k_scores);
  put_staircase("l", l_scores);
  put_staircase("strict_k", strict_scores);
  put_staircase("t", t_scores);
  return result;
}

}  // namespace trajrisk
