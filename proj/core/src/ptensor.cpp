#include "ptqed/ptensor.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <utility>

#include <Eigen/QR>
#include <Eigen/SVD>

#include "ptqed/errors.hpp"
#include "ptqed/hash.hpp"

namespace ptqed::pt {
namespace {

constexpr int kClasses = 4;

// Liouville index alpha = ket + 3 * bra -> coupling class 2*lambda_ket + lambda_bra.
constexpr std::array<int, 9> kAlphaClass = {0, 0, 2, 0, 0, 2, 1, 1, 3};
// Class-sorted ordering of Liouville indices and the per-class row blocks.
constexpr std::array<int, 9> kClassOrder = {0, 1, 3, 4, 6, 7, 2, 5, 8};
constexpr std::array<int, 4> kClassOffset = {0, 4, 6, 8};
constexpr std::array<int, 4> kClassCount = {4, 2, 2, 1};
// Weight of each class in a trace closure: diagonal density-matrix entries
// are split 2:1 between the doubly-unshifted and doubly-shifted classes.
constexpr std::array<double, 4> kClosureWeight = {2.0 / 3.0, 0.0, 0.0, 1.0 / 3.0};

inline int cls_lambda_ket(int c) { return c / 2; }
inline int cls_lambda_bra(int c) { return c % 2; }
inline int cls_diff(int c) { return c / 2 - c % 2; }

inline cd pair_weight(cd eta, int cls_later, int cls_earlier) {
  const cd base =
      eta * double(cls_lambda_ket(cls_earlier)) - std::conj(eta) * double(cls_lambda_bra(cls_earlier));
  return std::exp(-double(cls_diff(cls_later)) * base);
}

// 3 x 4 table: row D in {0,1,2} is the class difference d = D - 1 of the
// later slice, column the class of the earlier slice.
Eigen::Matrix<cd, 3, 4> lag_table(cd eta) {
  Eigen::Matrix<cd, 3, 4> tab;
  for (int c = 0; c < kClasses; ++c)
    for (int D = 0; D < 3; ++D) tab(D, c) = pair_weight(eta, (D == 0) ? 1 : (D == 1 ? 0 : 2), c);
  return tab;
}

Eigen::Vector4cd self_table(cd eta0) {
  Eigen::Vector4cd b0;
  for (int c = 0; c < kClasses; ++c) b0(c) = pair_weight(eta0, c, c);
  return b0;
}

// --- chain surgery ----------------------------------------------------------

// Multiply one lag factor into a window site, widening the right bond by the
// broadcast index D that carries the later slice's class difference.
PtCore widen_right(const PtCore& core, const Eigen::Matrix<cd, 3, 4>& tab) {
  PtCore out;
  out.chi_l = core.chi_l;
  out.chi_r = 3 * core.chi_r;
  out.m.resize(out.chi_l, 4l * out.chi_r);
  for (int c = 0; c < kClasses; ++c)
    for (int D = 0; D < 3; ++D)
      out.m.block(0, Eigen::Index(c) * out.chi_r + Eigen::Index(D) * core.chi_r, core.chi_l, core.chi_r) =
          tab(D, c) * core.slice(c);
  return out;
}

// Same, but the D index passes through both bonds (interior window sites).
PtCore widen_both(const PtCore& core, const Eigen::Matrix<cd, 3, 4>& tab) {
  PtCore out;
  out.chi_l = 3 * core.chi_l;
  out.chi_r = 3 * core.chi_r;
  out.m.setZero(out.chi_l, 4l * out.chi_r);
  for (int c = 0; c < kClasses; ++c)
    for (int D = 0; D < 3; ++D)
      out.m.block(Eigen::Index(D) * core.chi_l,
                  Eigen::Index(c) * out.chi_r + Eigen::Index(D) * core.chi_r, core.chi_l, core.chi_r) =
          tab(D, c) * core.slice(c);
  return out;
}

// Core for the newest slice.  If earlier window sites exist the left bond
// selects the slice's own class difference for them.
PtCore new_site(const Eigen::Vector4cd& b0, bool with_bond) {
  PtCore out;
  if (with_bond) {
    out.chi_l = 3;
    out.chi_r = 1;
    out.m.setZero(3, 4);
    for (int c = 0; c < kClasses; ++c) out.m(cls_diff(c) + 1, c) = b0(c);
  } else {
    out.chi_l = 1;
    out.chi_r = 1;
    out.m.resize(1, 4);
    for (int c = 0; c < kClasses; ++c) out.m(0, c) = b0(c);
  }
  return out;
}

// Orthogonalise site j from the left and push the remainder into site j+1.
void qr_push_right(std::vector<PtCore>& chain, int j) {
  PtCore& a = chain[static_cast<std::size_t>(j)];
  PtCore& b = chain[static_cast<std::size_t>(j) + 1];
  Eigen::MatrixXcd unfold(4l * a.chi_l, a.chi_r);
  for (int c = 0; c < kClasses; ++c)
    unfold.middleRows(Eigen::Index(c) * a.chi_l, a.chi_l) = a.slice(c);
  Eigen::HouseholderQR<Eigen::MatrixXcd> qr(unfold);
  const Eigen::Index r = std::min(unfold.rows(), unfold.cols());
  Eigen::MatrixXcd q = qr.householderQ() * Eigen::MatrixXcd::Identity(unfold.rows(), r);
  Eigen::MatrixXcd rest = qr.matrixQR().topRows(r).triangularView<Eigen::Upper>();
  // Keep the moved weight balanced: leave the orthogonal factor scaled to the
  // local magnitude and push only an O(1) remainder right.  Without this the
  // remainder compounds geometrically along the chain and overflows for long
  // tensors.
  const double scale = rest.cwiseAbs().maxCoeff();
  if (scale > 0.0) {
    rest /= scale;
    q *= scale;
  }
  Eigen::MatrixXcd na(a.chi_l, 4 * r);
  for (int c = 0; c < kClasses; ++c)
    na.middleCols(Eigen::Index(c) * r, r) = q.middleRows(Eigen::Index(c) * a.chi_l, a.chi_l);
  a.m = std::move(na);
  a.chi_r = static_cast<int>(r);
  b.m = rest * b.m;
  b.chi_l = static_cast<int>(r);
}

// Truncate the bond between sites j-1 and j with an SVD of site j's right
// unfolding; the kept weight moves into site j-1.  Returns the kept rank.
int svd_truncate_left(std::vector<PtCore>& chain, int j, double cutoff) {
  PtCore& b = chain[static_cast<std::size_t>(j)];
  PtCore& a = chain[static_cast<std::size_t>(j) - 1];
  const Eigen::Index min_dim = std::min<Eigen::Index>(b.m.rows(), b.m.cols());
  Eigen::MatrixXcd u, vh;
  Eigen::VectorXd sv;
  if (min_dim <= 16) {
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(b.m, Eigen::ComputeThinU | Eigen::ComputeThinV);
    u = svd.matrixU();
    vh = svd.matrixV().adjoint();
    sv = svd.singularValues();
  } else {
    Eigen::BDCSVD<Eigen::MatrixXcd> svd(b.m, Eigen::ComputeThinU | Eigen::ComputeThinV);
    u = svd.matrixU();
    vh = svd.matrixV().adjoint();
    sv = svd.singularValues();
  }
  const double smax = sv(0);
  int keep = 1;
  for (Eigen::Index i = 1; i < sv.size(); ++i) {
    if (sv(i) > cutoff * smax && sv(i) > 0.0)
      keep = static_cast<int>(i) + 1;
    else
      break;
  }
  // Deterministic gauge: rotate the largest entry of each kept left vector to
  // the positive real axis.
  for (int t = 0; t < keep; ++t) {
    Eigen::Index imax = 0;
    u.col(t).cwiseAbs().maxCoeff(&imax);
    const cd ph = u(imax, t) / std::abs(u(imax, t));
    u.col(t) *= std::conj(ph);
    vh.row(t) *= ph;
  }
  // Balanced split: the right factor keeps the local magnitude and the left
  // core sees a contraction of spectral norm one, so scale never concentrates
  // at a chain end (which would overflow for deep-memory, many-step builds).
  const double scale = sv(0) > 0.0 ? sv(0) : 1.0;
  Eigen::MatrixXcd carry = u.leftCols(keep) * (sv.head(keep) / scale).asDiagonal();
  Eigen::MatrixXcd na(a.chi_l, 4l * keep);
  for (int c = 0; c < kClasses; ++c)
    na.middleCols(Eigen::Index(c) * keep, keep).noalias() = a.slice(c) * carry;
  a.m = std::move(na);
  a.chi_r = keep;
  Eigen::MatrixXcd nb = scale * vh.topRows(keep);
  b.m = std::move(nb);
  b.chi_l = keep;
  return keep;
}

// Environment update: contract one core into a 9 x chi environment whose rows
// are ordered class-block-wise (kClassOrder).
void apply_core_sorted(const PtCore& core, const Eigen::MatrixXcd& e_in, Eigen::MatrixXcd& e_out) {
  e_out.resize(9, core.chi_r);
  for (int c = 0; c < kClasses; ++c)
    e_out.middleRows(kClassOffset[c], kClassCount[c]).noalias() =
        e_in.middleRows(kClassOffset[c], kClassCount[c]) * core.slice(c);
}

// Closure vectors: R[j] contracts cores j+1..end with the trace weights, so a
// readout after site j only needs E * R[j].
std::vector<Eigen::VectorXcd> closure_vectors(const ProcessTensor& tensor) {
  const int n = tensor.steps;
  std::vector<Eigen::VectorXcd> closures(static_cast<std::size_t>(n));
  Eigen::VectorXcd cur = Eigen::VectorXcd::Ones(tensor.cores.back().chi_r);
  closures[static_cast<std::size_t>(n) - 1] = cur;
  for (int j = n - 1; j > 0; --j) {
    const PtCore& core = tensor.cores[static_cast<std::size_t>(j)];
    Eigen::VectorXcd nxt = Eigen::VectorXcd::Zero(core.chi_l);
    for (int c = 0; c < kClasses; ++c) {
      if (kClosureWeight[c] == 0.0) continue;
      nxt.noalias() += kClosureWeight[c] * (core.slice(c) * cur);
    }
    cur = std::move(nxt);
    closures[static_cast<std::size_t>(j) - 1] = cur;
  }
  return closures;
}

Eigen::Matrix<cd, 9, 9> class_sort_matrix() {
  Eigen::Matrix<cd, 9, 9> p = Eigen::Matrix<cd, 9, 9>::Zero();
  for (int i = 0; i < 9; ++i) p(i, kClassOrder[static_cast<std::size_t>(i)]) = 1.0;
  return p;
}

struct SortedOps {
  Eigen::Matrix<cd, 9, 9> half, full, insert;
  Eigen::Matrix<cd, 1, 9> readout;  // trace of a^dag (.) after the trailing half step
  Eigen::Matrix<cd, 9, 9> unsort;
};

SortedOps make_sorted_ops(const sys::Propagators& props) {
  const Eigen::Matrix<cd, 9, 9> p = class_sort_matrix();
  const Eigen::Matrix<cd, 9, 9> pt = p.transpose();
  const Eigen::Matrix3cd a = sys::annihilation_op();
  const Eigen::Matrix<cd, 9, 9> lift_a = sys::left_mult_superop(a);
  SortedOps ops;
  ops.half = p * props.half * pt;
  ops.full = p * props.full * pt;
  ops.insert = p * (props.half * lift_a * props.half) * pt;
  ops.readout = (sys::trace_functional() * sys::left_mult_superop(a.adjoint().eval()) * props.half) * pt;
  ops.unsort = pt;
  return ops;
}

void check_grid_args(const ProcessTensor& tensor, const sys::Propagators& props, int steps) {
  if (steps < 1 || steps > tensor.steps)
    throw UsageError("requested step count " + std::to_string(steps) +
                     " outside the tensor's range [1, " + std::to_string(tensor.steps) + "]");
  const double dtol = 1e-9 * std::max(std::abs(props.dt), std::abs(tensor.dt));
  if (std::abs(props.dt - tensor.dt) > dtol)
    throw UsageError("propagator time step " + std::to_string(props.dt) +
                     " does not match the tensor grid step " + std::to_string(tensor.dt));
}

void write_bytes(std::ofstream& out, const void* data, std::size_t n) {
  out.write(static_cast<const char*>(data), static_cast<std::streamsize>(n));
}

bool read_bytes(std::ifstream& in, void* data, std::size_t n) {
  in.read(static_cast<char*>(data), static_cast<std::streamsize>(n));
  return in.good();
}

}  // namespace

std::vector<InfluenceFactor> influence_factors(const bath::MemoryKernel& kernel) {
  std::vector<InfluenceFactor> out;
  out.reserve(kernel.eta.size());
  for (int lag = 0; lag <= kernel.max_lag(); ++lag) out.push_back(influence_factor(kernel, lag));
  return out;
}

InfluenceFactor influence_factor(const bath::MemoryKernel& kernel, int lag) {
  if (lag < 0) throw UsageError("influence factor lag must be non-negative");
  InfluenceFactor out;
  out.lag = lag;
  if (lag > kernel.max_lag()) {
    out.values.setOnes();
    return out;
  }
  const cd eta = kernel.eta[static_cast<std::size_t>(lag)];
  for (int ai = 0; ai < 9; ++ai)
    for (int aj = 0; aj < 9; ++aj)
      out.values(ai, aj) = pair_weight(eta, kAlphaClass[static_cast<std::size_t>(ai)],
                                       kAlphaClass[static_cast<std::size_t>(aj)]);
  return out;
}

int ProcessTensor::max_bond() const {
  int m = 0;
  for (const auto& c : cores) m = std::max({m, c.chi_l, c.chi_r});
  return m;
}

std::vector<int> ProcessTensor::bond_dims() const {
  std::vector<int> out;
  out.reserve(cores.size());
  for (const auto& c : cores) out.push_back(c.chi_r);
  return out;
}

void ProcessTensor::validate() const {
  if (static_cast<int>(cores.size()) != steps) throw std::logic_error("core count does not match steps");
  int left = 1;
  for (std::size_t i = 0; i < cores.size(); ++i) {
    const PtCore& c = cores[i];
    if (c.chi_l != left) throw std::logic_error("bond mismatch entering core " + std::to_string(i));
    if (c.m.rows() != c.chi_l || c.m.cols() != 4l * c.chi_r)
      throw std::logic_error("core " + std::to_string(i) + " storage shape mismatch");
    left = c.chi_r;
  }
  if (left != 1) throw std::logic_error("chain does not terminate with a closed bond");
}

ProcessTensor build_process_tensor(const bath::MemoryKernel& kernel, int steps,
                                   const BuildOptions& opts) {
  if (steps < 1) throw UsageError("process tensor needs at least one step");
  if (!(opts.svd_cutoff >= 0.0 && opts.svd_cutoff < 1.0))
    throw UsageError("svd cutoff must lie in [0, 1)");
  if (opts.bond_cap < 4) throw UsageError("bond cap must be at least 4");
  if (kernel.eta.empty()) throw UsageError("memory kernel is empty");

  const int lag_depth = kernel.max_lag();
  std::vector<Eigen::Matrix<cd, 3, 4>> tabs(static_cast<std::size_t>(lag_depth) + 1);
  for (int m = 1; m <= lag_depth; ++m)
    tabs[static_cast<std::size_t>(m)] = lag_table(kernel.eta[static_cast<std::size_t>(m)]);
  const Eigen::Vector4cd b0 = self_table(kernel.eta[0]);

  std::vector<PtCore> chain;
  chain.reserve(static_cast<std::size_t>(steps));
  int center = 0;
  for (int s = 0; s < steps; ++s) {
    const int w0 = std::max(0, s - lag_depth);
    for (int j = w0; j < s; ++j) {
      const auto& tab = tabs[static_cast<std::size_t>(s - j)];
      PtCore& site = chain[static_cast<std::size_t>(j)];
      site = (j == w0) ? widen_right(site, tab) : widen_both(site, tab);
    }
    chain.push_back(new_site(b0, s > w0));
    for (int j = std::min(center, w0); j < s; ++j) qr_push_right(chain, j);
    for (int j = s; j > w0; --j) svd_truncate_left(chain, j, opts.svd_cutoff);
    center = w0;
    for (int j = w0; j <= s; ++j) {
      const PtCore& c = chain[static_cast<std::size_t>(j)];
      if (c.chi_l > opts.bond_cap || c.chi_r > opts.bond_cap)
        throw ResourceError("influence-tensor bond dimension exceeded the cap of " +
                            std::to_string(opts.bond_cap) + " at step " + std::to_string(s + 1) +
                            " of " + std::to_string(steps) +
                            "; raise the bond cap or loosen the svd cutoff");
    }
  }

  ProcessTensor out;
  out.dt = kernel.dt;
  out.steps = steps;
  out.memory_steps = lag_depth;
  out.svd_cutoff = opts.svd_cutoff;
  out.cores = std::move(chain);
  return out;
}

Eigen::VectorXcd dense_influence_functional(const bath::MemoryKernel& kernel, int steps) {
  if (steps < 1 || steps > 6)
    throw UsageError("dense influence functional supports 1..6 steps only");
  std::vector<Eigen::Matrix<cd, 9, 9>> factors;
  for (int lag = 0; lag < steps; ++lag) factors.push_back(influence_factor(kernel, lag).values);

  Eigen::Index total = 1;
  for (int i = 0; i < steps; ++i) total *= 9;
  Eigen::VectorXcd out(total);
  std::vector<int> digits(static_cast<std::size_t>(steps), 0);
  for (Eigen::Index flat = 0; flat < total; ++flat) {
    Eigen::Index rest = flat;
    for (int i = 0; i < steps; ++i) {
      digits[static_cast<std::size_t>(i)] = static_cast<int>(rest % 9);
      rest /= 9;
    }
    cd val = 1.0;
    for (int i = 0; i < steps; ++i)
      for (int j = 0; j <= i; ++j)
        val *= factors[static_cast<std::size_t>(i - j)](digits[static_cast<std::size_t>(i)],
                                                        digits[static_cast<std::size_t>(j)]);
    out(flat) = val;
  }
  return out;
}

Eigen::VectorXcd brute_force_populations_vector(const bath::MemoryKernel& kernel,
                                                const sys::Propagators& props,
                                                const Eigen::Matrix3cd& rho0, int steps) {
  const Eigen::VectorXcd influence = dense_influence_functional(kernel, steps);
  const sys::Vector9cd x0 = props.half * sys::vectorize(rho0);
  Eigen::VectorXcd out = Eigen::VectorXcd::Zero(9);
  std::vector<int> digits(static_cast<std::size_t>(steps), 0);
  for (Eigen::Index flat = 0; flat < influence.size(); ++flat) {
    Eigen::Index rest = flat;
    for (int i = 0; i < steps; ++i) {
      digits[static_cast<std::size_t>(i)] = static_cast<int>(rest % 9);
      rest /= 9;
    }
    cd weight = influence(flat) * x0(digits[0]);
    for (int i = 0; i + 1 < steps; ++i)
      weight *= props.full(digits[static_cast<std::size_t>(i) + 1], digits[static_cast<std::size_t>(i)]);
    out += weight * props.half.col(digits[static_cast<std::size_t>(steps) - 1]);
  }
  return out;
}

PopulationSeries propagate_populations(const ProcessTensor& tensor, const sys::Propagators& props,
                                       const Eigen::Matrix3cd& rho0, int steps) {
  check_grid_args(tensor, props, steps);
  const SortedOps ops = make_sorted_ops(props);
  const std::vector<Eigen::VectorXcd> closures = closure_vectors(tensor);
  const Eigen::Matrix<cd, 9, 9> sorter = class_sort_matrix();

  PopulationSeries series;
  series.dt = tensor.dt;
  series.t.reserve(static_cast<std::size_t>(steps) + 1);
  series.rho.reserve(static_cast<std::size_t>(steps) + 1);
  series.t.push_back(0.0);
  series.rho.push_back(rho0);

  Eigen::MatrixXcd env = sorter * (props.half * sys::vectorize(rho0));
  Eigen::MatrixXcd scratch, next;
  for (int s = 0; s < steps; ++s) {
    if (s == 0) {
      apply_core_sorted(tensor.cores[0], env, next);
    } else {
      scratch.noalias() = ops.full * env;
      apply_core_sorted(tensor.cores[static_cast<std::size_t>(s)], scratch, next);
    }
    env.swap(next);
    const sys::Vector9cd y =
        ops.unsort * (ops.half * (env * closures[static_cast<std::size_t>(s)]));
    series.t.push_back(tensor.dt * (s + 1));
    series.rho.push_back(sys::unvectorize(y));
  }

  series.cavity_population.reserve(series.rho.size());
  series.exciton_population.reserve(series.rho.size());
  for (const auto& rho : series.rho) {
    series.cavity_population.push_back(rho(1, 1).real());
    series.exciton_population.push_back(rho(2, 2).real());
    series.max_trace_deviation =
        std::max(series.max_trace_deviation, std::abs(rho.trace() - cd(1.0)));
    series.max_hermiticity_deviation = std::max(
        series.max_hermiticity_deviation, (rho - rho.adjoint()).cwiseAbs().maxCoeff());
  }
  return series;
}

PopulationSeries propagate_populations(const ProcessTensor& tensor, const sys::SystemParams& params,
                                       const Eigen::Matrix3cd& rho0) {
  return propagate_populations(tensor, sys::make_propagators(params, tensor.dt), rho0, tensor.steps);
}

CorrelationGrid two_time_correlation_grid(const ProcessTensor& tensor, const sys::Propagators& props,
                                          const Eigen::Matrix3cd& rho0, int steps) {
  check_grid_args(tensor, props, steps);
  const SortedOps ops = make_sorted_ops(props);
  const std::vector<Eigen::VectorXcd> closures = closure_vectors(tensor);
  const Eigen::Matrix<cd, 9, 9> sorter = class_sort_matrix();
  const Eigen::Matrix3cd a = sys::annihilation_op();

  CorrelationGrid grid;
  grid.dt = tensor.dt;
  grid.steps = steps;
  grid.g.setZero(steps + 1, steps + 1);

  // Forward pass: populations for the diagonal plus stored environments.
  std::vector<Eigen::MatrixXcd> envs(static_cast<std::size_t>(steps));
  {
    Eigen::MatrixXcd env = sorter * (props.half * sys::vectorize(rho0));
    Eigen::MatrixXcd scratch, next;
    Eigen::Matrix3cd rho = rho0;
    grid.g(0, 0) = rho(1, 1).real();
    for (int s = 0; s < steps; ++s) {
      if (s == 0) {
        apply_core_sorted(tensor.cores[0], env, next);
      } else {
        scratch.noalias() = ops.full * env;
        apply_core_sorted(tensor.cores[static_cast<std::size_t>(s)], scratch, next);
      }
      env.swap(next);
      envs[static_cast<std::size_t>(s)] = env;
      const sys::Vector9cd y =
          ops.unsort * (ops.half * (env * closures[static_cast<std::size_t>(s)]));
      rho = sys::unvectorize(y);
      grid.g(s + 1, s + 1) = rho(1, 1).real();
    }
  }

  // Off-diagonal rows: insert the photon operator at t_j, then keep evolving.
  const Eigen::MatrixXcd seed0 =
      sorter * (props.half * (sys::left_mult_superop(a) * sys::vectorize(rho0)));
  Eigen::MatrixXcd f, scratch;
  for (int j = 0; j < steps; ++j) {
    if (j == 0) {
      apply_core_sorted(tensor.cores[0], seed0, f);
    } else {
      scratch.noalias() = ops.insert * envs[static_cast<std::size_t>(j) - 1];
      apply_core_sorted(tensor.cores[static_cast<std::size_t>(j)], scratch, f);
    }
    grid.g(j + 1, j) = (ops.readout * (f * closures[static_cast<std::size_t>(j)])).value();
    for (int i = j + 2; i <= steps; ++i) {
      scratch.noalias() = ops.full * f;
      apply_core_sorted(tensor.cores[static_cast<std::size_t>(i) - 1], scratch, f);
      grid.g(i, j) = (ops.readout * (f * closures[static_cast<std::size_t>(i) - 1])).value();
    }
  }
  for (int j = 0; j <= steps; ++j)
    for (int i = j + 1; i <= steps; ++i) grid.g(j, i) = std::conj(grid.g(i, j));
  return grid;
}

CorrelationGrid two_time_correlation_grid(const ProcessTensor& tensor, const sys::SystemParams& params,
                                          const Eigen::Matrix3cd& rho0) {
  return two_time_correlation_grid(tensor, sys::make_propagators(params, tensor.dt), rho0,
                                   tensor.steps);
}

// --- binary cache -----------------------------------------------------------

namespace {
constexpr char kMagic[4] = {'P', 'T', 'C', '1'};
constexpr std::uint32_t kCacheVersion = 1;
}  // namespace

std::uint64_t cache_key(const bath::BathSpec& spec, double dt, int steps, const BuildOptions& opts) {
  char buf[512];
  std::snprintf(buf, sizeof(buf),
                "ptc1|alpha=%.17g|xi=%.17g|T=%.17g|numax=%.17g|nq=%d|dt=%.17g|steps=%d|cut=%.17g",
                spec.alpha, spec.xi, spec.temperature, spec.nu_max, spec.n_quad, dt, steps,
                opts.svd_cutoff);
  return fnv1a(buf, std::strlen(buf));
}

void save_process_tensor(const ProcessTensor& tensor, const std::filesystem::path& file,
                         std::uint64_t key) {
  std::ofstream out(file, std::ios::binary | std::ios::trunc);
  if (!out) throw ResourceError("cannot open cache file for writing: " + file.string());
  write_bytes(out, kMagic, 4);
  write_bytes(out, &kCacheVersion, sizeof(kCacheVersion));
  write_bytes(out, &key, sizeof(key));
  write_bytes(out, &tensor.dt, sizeof(tensor.dt));
  const std::int32_t steps = tensor.steps;
  const std::int32_t mem = tensor.memory_steps;
  write_bytes(out, &steps, sizeof(steps));
  write_bytes(out, &mem, sizeof(mem));
  write_bytes(out, &tensor.svd_cutoff, sizeof(tensor.svd_cutoff));
  for (const PtCore& core : tensor.cores) {
    const std::int32_t cl = core.chi_l;
    const std::int32_t cr = core.chi_r;
    write_bytes(out, &cl, sizeof(cl));
    write_bytes(out, &cr, sizeof(cr));
    write_bytes(out, core.m.data(), sizeof(cd) * static_cast<std::size_t>(core.m.size()));
  }
  if (!out) throw ResourceError("short write while saving cache file: " + file.string());
}

std::optional<ProcessTensor> load_process_tensor(const std::filesystem::path& file,
                                                 std::uint64_t key) {
  std::ifstream in(file, std::ios::binary);
  if (!in) return std::nullopt;
  char magic[4];
  std::uint32_t version = 0;
  std::uint64_t stored_key = 0;
  if (!read_bytes(in, magic, 4) || std::memcmp(magic, kMagic, 4) != 0) return std::nullopt;
  if (!read_bytes(in, &version, sizeof(version)) || version != kCacheVersion) return std::nullopt;
  if (!read_bytes(in, &stored_key, sizeof(stored_key)) || stored_key != key) return std::nullopt;

  ProcessTensor tensor;
  std::int32_t steps = 0, mem = 0;
  if (!read_bytes(in, &tensor.dt, sizeof(tensor.dt))) return std::nullopt;
  if (!read_bytes(in, &steps, sizeof(steps))) return std::nullopt;
  if (!read_bytes(in, &mem, sizeof(mem))) return std::nullopt;
  if (!read_bytes(in, &tensor.svd_cutoff, sizeof(tensor.svd_cutoff))) return std::nullopt;
  if (steps < 1 || steps > 10'000'000) return std::nullopt;
  tensor.steps = steps;
  tensor.memory_steps = mem;
  tensor.cores.reserve(static_cast<std::size_t>(steps));
  for (std::int32_t i = 0; i < steps; ++i) {
    std::int32_t cl = 0, cr = 0;
    if (!read_bytes(in, &cl, sizeof(cl)) || !read_bytes(in, &cr, sizeof(cr))) return std::nullopt;
    if (cl < 1 || cr < 1 || cl > 1'000'000 || cr > 1'000'000) return std::nullopt;
    PtCore core;
    core.chi_l = cl;
    core.chi_r = cr;
    core.m.resize(cl, 4l * cr);
    if (!read_bytes(in, core.m.data(), sizeof(cd) * static_cast<std::size_t>(core.m.size())))
      return std::nullopt;
    tensor.cores.push_back(std::move(core));
  }
  try {
    tensor.validate();
  } catch (const std::logic_error&) {
    return std::nullopt;
  }
  return tensor;
}

}  // namespace ptqed::pt
