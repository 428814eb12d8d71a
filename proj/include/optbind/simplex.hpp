#pragma once

// Bounded primal simplex on the revised form.
//
// Every row i carries a logical variable s_i = a_i x with bounds
// [row_lo_i, row_hi_i], so the working system is  A x - s = 0  with all
// variables boxed (possibly infinitely). Phase 1 starts from an all-logical
// basis and adds an artificial column only for rows whose starting activity
// lies outside the row bounds. The basis inverse is held densely and updated
// in product form; only nonzeros of the pivot column are touched, which keeps
// network-like models (transportation) cheap.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <span>
#include <vector>

#include "optbind/model.hpp"
#include "optbind/solver_types.hpp"

namespace optbind::lp {

struct ColumnMatrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<std::size_t> start;
  std::vector<std::size_t> index;
  std::vector<double> value;
};

inline ColumnMatrix to_columns(const SparseMatrix& a) {
  ColumnMatrix out;
  out.rows = a.rows;
  out.cols = a.cols;
  out.start.assign(a.cols + 1, 0);
  for (const auto& t : a.entries) ++out.start[t.col + 1];
  for (std::size_t j = 0; j < a.cols; ++j) out.start[j + 1] += out.start[j];
  out.index.resize(a.entries.size());
  out.value.resize(a.entries.size());
  std::vector<std::size_t> fill(out.start.begin(), out.start.end() - 1);
  for (const auto& t : a.entries) {
    out.index[fill[t.col]] = t.row;
    out.value[fill[t.col]] = t.val;
    ++fill[t.col];
  }
  return out;
}

// min cost'x  s.t.  row_lo <= A x <= row_hi, column bounds supplied per solve.
struct LpProblem {
  ColumnMatrix a;
  std::vector<double> cost;
  std::vector<double> row_lo;
  std::vector<double> row_hi;
};

// Linear part of the model in minimization form (MAX objectives negated).
inline LpProblem make_lp(const StandardFormModel& m) {
  LpProblem p;
  p.a = to_columns(m.a);
  p.cost = m.c;
  if (m.sense == Sense::Max)
    for (auto& v : p.cost) v = -v;
  p.row_lo.resize(m.num_rows());
  p.row_hi.resize(m.num_rows());
  for (std::size_t i = 0; i < m.num_rows(); ++i) {
    switch (m.row_sense[i]) {
      case RowSense::LE: p.row_lo[i] = -kInf; p.row_hi[i] = m.b[i]; break;
      case RowSense::GE: p.row_lo[i] = m.b[i]; p.row_hi[i] = kInf; break;
      case RowSense::EQ: p.row_lo[i] = p.row_hi[i] = m.b[i]; break;
    }
  }
  return p;
}

struct LpOptions {
  double primal_tol = 1e-9;
  double dual_tol = 1e-9;
  double pivot_tol = 1e-9;
  std::size_t iter_limit = 2'000'000;
  std::size_t stall_threshold = 50;  // consecutive degenerate pivots before Bland's rule
};

// Final basis of an optimal solve; a later solve of the same problem with
// changed column bounds may start from it.
struct WarmStart {
  std::vector<std::size_t> basis;
  std::vector<unsigned char> state;
  std::vector<double> sigma;
};

struct LpOutcome {
  SolveStatus status = SolveStatus::Infeasible;
  double objective = 0.0;  // in minimization form
  std::vector<double> x;
  std::size_t iterations = 0;
  std::optional<WarmStart> basis;  // set when optimal
};

namespace detail {

class BoundedSimplex {
 public:
  BoundedSimplex(const LpProblem& p, std::span<const double> lb, std::span<const double> ub,
                 const LpOptions& opt)
      : p_(p), opt_(opt), n_(p.a.cols), m_(p.a.rows), total_(n_ + 2 * m_) {
    lo_.resize(total_);
    hi_.resize(total_);
    x_.assign(total_, 0.0);
    state_.assign(total_, State::AtLower);
    pos_.assign(total_, kNoPos);
    sigma_.assign(m_, 1.0);
    for (std::size_t j = 0; j < n_; ++j) {
      lo_[j] = lb[j];
      hi_[j] = ub[j];
    }
    for (std::size_t i = 0; i < m_; ++i) {
      lo_[n_ + i] = p.row_lo[i];
      hi_[n_ + i] = p.row_hi[i];
      lo_[n_ + m_ + i] = 0.0;
      hi_[n_ + m_ + i] = 0.0;
    }
  }

  LpOutcome run() {
    LpOutcome out;
    for (std::size_t j = 0; j < n_; ++j)
      if (lo_[j] > hi_[j] + opt_.primal_tol) return out;  // empty box

    initial_basis();

    bool need_phase1 = false;
    for (std::size_t i = 0; i < m_; ++i)
      if (basis_[i] >= n_ + m_) need_phase1 = true;

    if (need_phase1) {
      cost_.assign(total_, 0.0);
      for (std::size_t i = 0; i < m_; ++i) cost_[n_ + m_ + i] = 1.0;
      const auto st = run_phase();
      if (st == SolveStatus::IterLimit) {
        out.status = st;
        out.iterations = iterations_;
        return out;
      }
      double infeas = 0.0;
      double scale = 1.0;
      for (std::size_t i = 0; i < m_; ++i) {
        infeas += x_[n_ + m_ + i];
        if (std::isfinite(p_.row_lo[i])) scale = std::max(scale, std::abs(p_.row_lo[i]));
        if (std::isfinite(p_.row_hi[i])) scale = std::max(scale, std::abs(p_.row_hi[i]));
      }
      if (infeas > 1e-7 * scale) {
        out.status = SolveStatus::Infeasible;
        out.iterations = iterations_;
        return out;
      }
      for (std::size_t i = 0; i < m_; ++i) {
        const std::size_t a = n_ + m_ + i;
        hi_[a] = 0.0;
        if (state_[a] != State::Basic) x_[a] = 0.0;
      }
      fresh_ = false;
    }

    cost_.assign(total_, 0.0);
    for (std::size_t j = 0; j < n_; ++j) cost_[j] = p_.cost[j];
    const auto st = run_phase();
    out.status = st;
    out.iterations = iterations_;
    if (st == SolveStatus::Optimal) finish(out);
    return out;
  }

  // Starts from a previous optimal basis. Basic variables pushed outside
  // their new bounds are first driven back inside with a temporary objective.
  // Returns nothing when that does not settle cleanly, so the caller can fall
  // back to a cold start.
  std::optional<LpOutcome> run_warm(const WarmStart& ws) {
    LpOutcome out;
    for (std::size_t j = 0; j < n_; ++j)
      if (lo_[j] > hi_[j] + opt_.primal_tol) return out;
    if (ws.basis.size() != m_ || ws.state.size() != total_ || ws.sigma.size() != m_) return std::nullopt;
    basis_ = ws.basis;
    sigma_ = ws.sigma;
    for (std::size_t j = 0; j < total_; ++j) {
      state_[j] = static_cast<State>(ws.state[j]);
      if (state_[j] == State::Basic) continue;
      if (state_[j] == State::AtLower && std::isfinite(lo_[j])) x_[j] = lo_[j];
      else if (state_[j] == State::AtUpper && std::isfinite(hi_[j])) x_[j] = hi_[j];
      else {
        state_[j] = nonbasic_state(j);
        x_[j] = nonbasic_value(j);
      }
    }
    for (std::size_t i = 0; i < m_; ++i) {
      if (basis_[i] >= total_ || state_[basis_[i]] != State::Basic) return std::nullopt;
      pos_[basis_[i]] = i;
    }
    try {
      refactor();
    } catch (const Error&) {
      return std::nullopt;
    }

    struct Shifted {
      std::size_t j;
      double lo, hi;
    };
    std::vector<Shifted> shifted;
    cost_.assign(total_, 0.0);
    for (std::size_t i = 0; i < m_; ++i) {
      const std::size_t j = basis_[i];
      const double v = x_[j];
      if (v > hi_[j] + opt_.primal_tol) {
        shifted.push_back({j, lo_[j], hi_[j]});
        hi_[j] = v;
        cost_[j] = 1.0;
      } else if (v < lo_[j] - opt_.primal_tol) {
        shifted.push_back({j, lo_[j], hi_[j]});
        lo_[j] = v;
        cost_[j] = -1.0;
      }
    }
    if (!shifted.empty()) {
      if (run_phase() != SolveStatus::Optimal) return std::nullopt;
      for (const auto& sh : shifted) {
        const double v = x_[sh.j];
        const bool inside = v <= sh.hi + opt_.primal_tol && v >= sh.lo - opt_.primal_tol;
        if (!inside) {
          if (shifted.size() > 1) return std::nullopt;
          // one shifted variable pushed as far as it goes: the new box is empty
          out.status = SolveStatus::Infeasible;
          out.iterations = iterations_;
          return out;
        }
        lo_[sh.j] = sh.lo;
        hi_[sh.j] = sh.hi;
        if (state_[sh.j] != State::Basic) {
          if (std::abs(v - sh.lo) <= opt_.primal_tol) {
            state_[sh.j] = State::AtLower;
            x_[sh.j] = sh.lo;
          } else if (std::abs(v - sh.hi) <= opt_.primal_tol) {
            state_[sh.j] = State::AtUpper;
            x_[sh.j] = sh.hi;
          } else {
            return std::nullopt;
          }
        }
      }
      recompute_basic_values();
    }

    cost_.assign(total_, 0.0);
    for (std::size_t j = 0; j < n_; ++j) cost_[j] = p_.cost[j];
    const auto st = run_phase();
    out.status = st;
    out.iterations = iterations_;
    if (st == SolveStatus::Optimal) finish(out);
    return out;
  }

  std::size_t iterations() const { return iterations_; }

 private:
  enum class State : unsigned char { Basic, AtLower, AtUpper, FreeZero };
  static constexpr std::size_t kNoPos = static_cast<std::size_t>(-1);

  template <typename F>
  void for_column(std::size_t j, F&& f) const {
    if (j < n_) {
      for (std::size_t k = p_.a.start[j]; k < p_.a.start[j + 1]; ++k) f(p_.a.index[k], p_.a.value[k]);
    } else if (j < n_ + m_) {
      f(j - n_, -1.0);
    } else {
      f(j - n_ - m_, sigma_[j - n_ - m_]);
    }
  }

  void finish(LpOutcome& out) const {
    out.x.assign(x_.begin(), x_.begin() + static_cast<std::ptrdiff_t>(n_));
    double obj = 0.0;
    for (std::size_t j = 0; j < n_; ++j) obj += p_.cost[j] * out.x[j];
    out.objective = obj;
    WarmStart ws;
    ws.basis = basis_;
    ws.sigma = sigma_;
    ws.state.resize(total_);
    for (std::size_t j = 0; j < total_; ++j) ws.state[j] = static_cast<unsigned char>(state_[j]);
    out.basis = std::move(ws);
  }

  double nonbasic_value(std::size_t j) const {
    if (std::isfinite(lo_[j])) return lo_[j];
    if (std::isfinite(hi_[j])) return hi_[j];
    return 0.0;
  }

  State nonbasic_state(std::size_t j) const {
    if (std::isfinite(lo_[j])) return State::AtLower;
    if (std::isfinite(hi_[j])) return State::AtUpper;
    return State::FreeZero;
  }

  void initial_basis() {
    std::vector<double> act(m_, 0.0);
    for (std::size_t j = 0; j < n_; ++j) {
      state_[j] = nonbasic_state(j);
      x_[j] = nonbasic_value(j);
      if (x_[j] != 0.0) for_column(j, [&](std::size_t r, double v) { act[r] += v * x_[j]; });
    }
    basis_.assign(m_, 0);
    binv_.assign(m_ * m_, 0.0);
    for (std::size_t i = 0; i < m_; ++i) {
      const std::size_t s = n_ + i;
      const std::size_t a = n_ + m_ + i;
      const double r = act[i];
      if (r >= lo_[s] - opt_.primal_tol && r <= hi_[s] + opt_.primal_tol) {
        basis_[i] = s;
        state_[s] = State::Basic;
        x_[s] = r;
        state_[a] = State::AtLower;
        x_[a] = 0.0;
        binv_[i * m_ + i] = -1.0;
      } else {
        const double v = r < lo_[s] ? lo_[s] : hi_[s];
        state_[s] = r < lo_[s] ? State::AtLower : State::AtUpper;
        x_[s] = v;
        // a_i x - s + sigma * art = 0  =>  sigma * art = v - r
        sigma_[i] = v - r >= 0.0 ? 1.0 : -1.0;
        hi_[a] = kInf;
        basis_[i] = a;
        state_[a] = State::Basic;
        x_[a] = std::abs(v - r);
        binv_[i * m_ + i] = sigma_[i];
      }
      pos_[basis_[i]] = i;
    }
  }

  // Gauss-Jordan inversion of the current basis, then recompute x_B.
  void refactor() {
    std::vector<double> bmat(m_ * m_, 0.0);
    for (std::size_t i = 0; i < m_; ++i)
      for_column(basis_[i], [&](std::size_t r, double v) { bmat[r * m_ + i] = v; });
    std::vector<double> inv(m_ * m_, 0.0);
    for (std::size_t i = 0; i < m_; ++i) inv[i * m_ + i] = 1.0;
    for (std::size_t col = 0; col < m_; ++col) {
      std::size_t piv = col;
      double best = std::abs(bmat[col * m_ + col]);
      for (std::size_t r = col + 1; r < m_; ++r) {
        const double v = std::abs(bmat[r * m_ + col]);
        if (v > best) {
          best = v;
          piv = r;
        }
      }
      if (best < 1e-13) throw internal_error("simplex basis became singular");
      if (piv != col) {
        for (std::size_t k = 0; k < m_; ++k) {
          std::swap(bmat[piv * m_ + k], bmat[col * m_ + k]);
          std::swap(inv[piv * m_ + k], inv[col * m_ + k]);
        }
      }
      const double d = bmat[col * m_ + col];
      for (std::size_t k = 0; k < m_; ++k) {
        bmat[col * m_ + k] /= d;
        inv[col * m_ + k] /= d;
      }
      for (std::size_t r = 0; r < m_; ++r) {
        if (r == col) continue;
        const double f = bmat[r * m_ + col];
        if (f == 0.0) continue;
        for (std::size_t k = 0; k < m_; ++k) {
          bmat[r * m_ + k] -= f * bmat[col * m_ + k];
          inv[r * m_ + k] -= f * inv[col * m_ + k];
        }
      }
    }
    // Row i of inv corresponds to basis position i because B's column i is basis_[i].
    binv_ = std::move(inv);
    recompute_basic_values();
    since_refactor_ = 0;
    fresh_ = true;
  }

  void recompute_basic_values() {
    std::vector<double> rhs(m_, 0.0);
    for (std::size_t j = 0; j < total_; ++j) {
      if (state_[j] == State::Basic || x_[j] == 0.0) continue;
      for_column(j, [&](std::size_t r, double v) { rhs[r] -= v * x_[j]; });
    }
    for (std::size_t i = 0; i < m_; ++i) {
      double s = 0.0;
      const double* row = &binv_[i * m_];
      for (std::size_t k = 0; k < m_; ++k) s += row[k] * rhs[k];
      x_[basis_[i]] = s;
    }
  }

  void compute_duals() {
    y_.assign(m_, 0.0);
    for (std::size_t i = 0; i < m_; ++i) {
      const double cb = cost_[basis_[i]];
      if (cb == 0.0) continue;
      const double* row = &binv_[i * m_];
      for (std::size_t k = 0; k < m_; ++k) y_[k] += cb * row[k];
    }
    d_.assign(total_, 0.0);
    for (std::size_t j = 0; j < total_; ++j) {
      if (state_[j] == State::Basic) continue;
      double s = cost_[j];
      for_column(j, [&](std::size_t r, double v) { s -= y_[r] * v; });
      d_[j] = s;
    }
  }

  bool eligible(std::size_t j) const {
    if (state_[j] == State::Basic || lo_[j] == hi_[j]) return false;
    switch (state_[j]) {
      case State::AtLower: return d_[j] < -opt_.dual_tol;
      case State::AtUpper: return d_[j] > opt_.dual_tol;
      case State::FreeZero: return std::abs(d_[j]) > opt_.dual_tol;
      default: return false;
    }
  }

  std::size_t price(bool bland) const {
    std::size_t best = kNoPos;
    double best_v = 0.0;
    for (std::size_t j = 0; j < total_; ++j) {
      if (!eligible(j)) continue;
      if (bland) return j;
      const double v = std::abs(d_[j]);
      if (v > best_v) {
        best_v = v;
        best = j;
      }
    }
    return best;
  }

  SolveStatus run_phase() {
    if (since_refactor_ > 0 || !fresh_) refactor();
    compute_duals();
    std::size_t degenerate_run = 0;
    const std::size_t refactor_every = std::max<std::size_t>(64, m_);
    std::vector<double> alpha(m_);
    std::vector<std::size_t> alpha_nz;
    std::vector<double> rho(m_);
    std::vector<std::size_t> rho_nz;
    for (;;) {
      if (iterations_ >= opt_.iter_limit) return SolveStatus::IterLimit;
      if (since_refactor_ >= refactor_every) {
        refactor();
        compute_duals();
      }
      const bool bland = degenerate_run >= opt_.stall_threshold;
      std::size_t q = price(bland);
      if (q == kNoPos) {
        if (since_refactor_ == 0) return SolveStatus::Optimal;
        refactor();
        compute_duals();
        q = price(bland);
        if (q == kNoPos) return SolveStatus::Optimal;
      }
      const double dir = (state_[q] == State::AtUpper || (state_[q] == State::FreeZero && d_[q] > 0))
                             ? -1.0
                             : 1.0;

      // alpha = B^-1 a_q
      std::fill(alpha.begin(), alpha.end(), 0.0);
      for_column(q, [&](std::size_t r, double v) {
        for (std::size_t i = 0; i < m_; ++i) alpha[i] += binv_[i * m_ + r] * v;
      });
      alpha_nz.clear();
      for (std::size_t i = 0; i < m_; ++i)
        if (std::abs(alpha[i]) > 1e-12) alpha_nz.push_back(i);

      // Ratio test. Basic i moves by -dir * alpha_i per unit step.
      std::size_t leave = kNoPos;
      double theta = kInf;
      if (bland) {
        for (std::size_t i : alpha_nz) {
          const double delta = -dir * alpha[i];
          if (std::abs(delta) < opt_.pivot_tol) continue;
          const std::size_t bj = basis_[i];
          double t = kInf;
          if (delta < 0 && std::isfinite(lo_[bj])) t = (x_[bj] - lo_[bj]) / -delta;
          if (delta > 0 && std::isfinite(hi_[bj])) t = (hi_[bj] - x_[bj]) / delta;
          t = std::max(t, 0.0);
          if (t < theta - 1e-12 || (t <= theta + 1e-12 && leave != kNoPos && bj < basis_[leave])) {
            if (t < theta) theta = t;
            leave = i;
          }
        }
      } else {
        // Harris two-pass: bound the step with relaxed bounds, then pick the
        // largest pivot among rows whose exact ratio fits under that bound.
        double relaxed = kInf;
        for (std::size_t i : alpha_nz) {
          const double delta = -dir * alpha[i];
          if (std::abs(delta) < opt_.pivot_tol) continue;
          const std::size_t bj = basis_[i];
          double t = kInf;
          if (delta < 0 && std::isfinite(lo_[bj])) t = (x_[bj] - lo_[bj] + opt_.primal_tol) / -delta;
          if (delta > 0 && std::isfinite(hi_[bj])) t = (hi_[bj] - x_[bj] + opt_.primal_tol) / delta;
          relaxed = std::min(relaxed, t);
        }
        if (std::isfinite(relaxed)) {
          double best_piv = 0.0;
          for (std::size_t i : alpha_nz) {
            const double delta = -dir * alpha[i];
            if (std::abs(delta) < opt_.pivot_tol) continue;
            const std::size_t bj = basis_[i];
            double t = kInf;
            if (delta < 0 && std::isfinite(lo_[bj])) t = (x_[bj] - lo_[bj]) / -delta;
            if (delta > 0 && std::isfinite(hi_[bj])) t = (hi_[bj] - x_[bj]) / delta;
            if (t <= relaxed && std::abs(alpha[i]) > best_piv) {
              best_piv = std::abs(alpha[i]);
              leave = i;
              theta = std::max(t, 0.0);
            }
          }
        }
      }

      const double range = hi_[q] - lo_[q];
      const bool flip = std::isfinite(range) && range <= theta;
      if (!flip && leave == kNoPos) return SolveStatus::Unbounded;
      if (flip) theta = range;

      ++iterations_;
      degenerate_run = theta <= 1e-12 ? degenerate_run + 1 : 0;

      // Primal update.
      if (theta != 0.0) {
        x_[q] += dir * theta;
        for (std::size_t i : alpha_nz) x_[basis_[i]] -= dir * theta * alpha[i];
      }

      if (flip) {
        state_[q] = dir > 0 ? State::AtUpper : State::AtLower;
        x_[q] = dir > 0 ? hi_[q] : lo_[q];
        continue;
      }

      const std::size_t r = leave;
      const std::size_t out = basis_[r];
      const double alpha_r = alpha[r];
      const double dq = d_[q];

      // Row r of the old inverse, for the reduced-cost update.
      rho_nz.clear();
      for (std::size_t k = 0; k < m_; ++k) {
        rho[k] = binv_[r * m_ + k];
        if (rho[k] != 0.0) rho_nz.push_back(k);
      }

      // Leaving variable settles on the bound it hit.
      const double delta_out = -dir * alpha_r;
      if (delta_out < 0) {
        state_[out] = State::AtLower;
        x_[out] = lo_[out];
      } else {
        state_[out] = State::AtUpper;
        x_[out] = hi_[out];
      }
      if (!std::isfinite(x_[out])) {
        state_[out] = State::FreeZero;
        x_[out] = 0.0;
      }
      pos_[out] = kNoPos;
      basis_[r] = q;
      pos_[q] = r;
      state_[q] = State::Basic;

      // Product-form update of the inverse.
      {
        double* row_r = &binv_[r * m_];
        const double inv_piv = 1.0 / alpha_r;
        for (std::size_t k : rho_nz) row_r[k] *= inv_piv;
        for (std::size_t i : alpha_nz) {
          if (i == r) continue;
          const double f = alpha[i];
          double* row_i = &binv_[i * m_];
          for (std::size_t k : rho_nz) row_i[k] -= f * row_r[k];
        }
      }

      // Reduced costs: d_j -= (d_q / alpha_r) * (rho . a_j).
      const double ratio = dq / alpha_r;
      if (ratio != 0.0) {
        for (std::size_t j = 0; j < total_; ++j) {
          if (state_[j] == State::Basic) continue;
          double s = 0.0;
          if (j < n_) {
            for (std::size_t k = p_.a.start[j]; k < p_.a.start[j + 1]; ++k) s += rho[p_.a.index[k]] * p_.a.value[k];
          } else if (j < n_ + m_) {
            s = -rho[j - n_];
          } else {
            s = sigma_[j - n_ - m_] * rho[j - n_ - m_];
          }
          if (s != 0.0) d_[j] -= ratio * s;
        }
      }
      d_[q] = 0.0;
      ++since_refactor_;
    }
  }

  const LpProblem& p_;
  LpOptions opt_;
  std::size_t n_, m_, total_;
  std::vector<double> lo_, hi_, x_, cost_, sigma_, binv_, y_, d_;
  std::vector<State> state_;
  std::vector<std::size_t> basis_, pos_;
  std::size_t iterations_ = 0;
  std::size_t since_refactor_ = 0;
  bool fresh_ = false;  // binv_ and x_B come from refactor() under the current bounds
};

}  // namespace detail

inline LpOutcome solve(const LpProblem& p, std::span<const double> lb, std::span<const double> ub,
                       const LpOptions& opt = {}, const WarmStart* start = nullptr) {
  std::size_t spent = 0;
  if (start) {
    detail::BoundedSimplex w(p, lb, ub, opt);
    if (auto out = w.run_warm(*start)) return std::move(*out);
    spent = w.iterations();
  }
  detail::BoundedSimplex s(p, lb, ub, opt);
  auto out = s.run();
  out.iterations += spent;
  return out;
}

}  // namespace optbind::lp
