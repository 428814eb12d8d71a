#pragma once

#include <string>
#include <vector>

#include "optbind/generators/category.hpp"

namespace optbind {

inline void sample_jssp(WorldState& w, Rng& rng) {
  const std::size_t nj = w.count("num_jobs");
  const std::size_t nm = w.count("num_machines");
  std::vector<double> seq(nj * nm), p(nj * nm);
  for (std::size_t j = 0; j < nj; ++j) {
    const auto perm = rng.permutation(nm);
    for (std::size_t k = 0; k < nm; ++k) {
      seq[j * nm + k] = static_cast<double>(perm[k]);
      p[j * nm + k] = static_cast<double>(rng.integer(1, 20));
    }
  }
  w.params["machine_sequence"] = Array::matrix(nj, nm, seq);
  w.params["processing_times"] = Array::matrix(nj, nm, p);
  w.meta["ranges"] = {{"processing_times", "U{1..20}"}};
}

// Disjunctive formulation. Operation k of job j starts at s[j][k]; for every
// machine and every pair of jobs a < b, y = 1 puts a first. The big-M is the
// total processing time, which bounds every start in any schedule without
// idle gaps.
inline Formulation formulate_jssp(const WorldState& w) {
  const std::size_t nj = w.count("num_jobs");
  const std::size_t nm = w.count("num_machines");
  const auto& seq = w.param("machine_sequence");
  const auto& p = w.param("processing_times");
  double horizon = 0.0;
  for (double v : p.data) horizon += v;
  for (std::size_t j = 0; j < nj; ++j) {
    std::vector<bool> seen(nm, false);
    for (std::size_t k = 0; k < nm; ++k) {
      const double m = seq(j, k);
      if (m < 0 || m >= static_cast<double>(nm) || seen[static_cast<std::size_t>(m)])
        throw data_error("machine_sequence row " + std::to_string(j) + " is not a permutation of machines");
      seen[static_cast<std::size_t>(m)] = true;
    }
  }

  gen::FormulationBuilder b(Sense::Min);
  std::vector<std::size_t> start(nj * nm);
  // position of the operation of job j that runs on machine m
  std::vector<std::size_t> op_on(nj * nm);
  for (std::size_t j = 0; j < nj; ++j)
    for (std::size_t k = 0; k < nm; ++k) {
      start[j * nm + k] = b.var("s_" + gen::label("J", j) + "_" + gen::label("O", k), 0.0, 0.0,
                                horizon - p(j, k));
      op_on[j * nm + static_cast<std::size_t>(seq(j, k))] = k;
    }
  const std::size_t cmax = b.var("makespan", 1.0, 0.0, horizon);

  for (std::size_t j = 0; j < nj; ++j)
    for (std::size_t k = 0; k + 1 < nm; ++k)
      b.row("prec_" + gen::label("J", j) + "_" + gen::label("O", k),
            {{start[j * nm + k + 1], 1.0}, {start[j * nm + k], -1.0}}, RowSense::GE, p(j, k));

  for (std::size_t m = 0; m < nm; ++m)
    for (std::size_t a = 0; a < nj; ++a)
      for (std::size_t c = a + 1; c < nj; ++c) {
        const std::size_t ka = op_on[a * nm + m], kc = op_on[c * nm + m];
        const std::size_t sa = start[a * nm + ka], sc = start[c * nm + kc];
        const std::string tag = gen::label("M", m) + "_" + gen::label("J", a) + "_" + gen::label("J", c);
        const std::size_t y = b.var("y_" + tag, 0.0, 0.0, 1.0, VarType::Binary);
        // y = 1: a before c.   y = 0: c before a.
        b.row("order_" + tag + "_a", {{sc, 1.0}, {sa, -1.0}, {y, -horizon}}, RowSense::GE, p(a, ka) - horizon);
        b.row("order_" + tag + "_b", {{sa, 1.0}, {sc, -1.0}, {y, horizon}}, RowSense::GE, p(c, kc));
      }

  for (std::size_t j = 0; j < nj; ++j)
    b.row("finish_" + gen::label("J", j), {{cmax, 1.0}, {start[j * nm + nm - 1], -1.0}}, RowSense::GE,
          p(j, nm - 1));
  return b.finish();
}

inline CategoryDef jssp_def() {
  CategoryDef d{Category::Jssp};
  d.ranges = {{"num_jobs", 1, 8, 2, 4}, {"num_machines", 1, 8, 2, 4}};
  d.schema.dims = {"num_jobs", "num_machines"};
  d.schema.fields = {
      {"machine_sequence", {"num_jobs", "num_machines"}, ElementType::Int,
       "machine (zero-based) of each job's operations in processing order"},
      {"processing_times", {"num_jobs", "num_machines"}, ElementType::Int,
       "duration of each job's operations in processing order"},
  };
  d.sample = sample_jssp;
  d.formulate = formulate_jssp;
  return d;
}

}  // namespace optbind
