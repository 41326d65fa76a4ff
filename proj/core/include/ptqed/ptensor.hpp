// ptensor.hpp -- tensor-train representation of the phonon influence functional
// and the contraction routines that turn it into reduced-system dynamics.
//
// The emitter-cavity density matrix is evolved on a uniform time grid.  Between
// consecutive short-time propagator half steps, the phonon environment imprints
// a discretised influence functional: a product of pair factors b_{i-j} linking
// the diagonal-coupling class of every pair of time slices closer than the
// memory depth.  That functional is stored as a matrix-product (tensor-train)
// chain, one core per time slice, built iteratively and compressed with
// singular-value truncation after every growth step.
#pragma once

#include <complex>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "ptqed/bath.hpp"
#include "ptqed/system.hpp"

namespace ptqed::pt {

using cd = std::complex<double>;

// Pair factor for one lag: values(later, earlier) indexed by Liouville index.
// Rows depend on the later slice only through its class difference
// d = lambda_ket - lambda_bra; columns through (eta * lambda_ket -
// conj(eta) * lambda_bra) of the earlier slice.
struct InfluenceFactor {
  int lag = 0;
  Eigen::Matrix<cd, 9, 9> values;
};

// Build the full-rank pair factor for a given kernel lag.  Lags beyond the
// kernel depth yield the all-ones (no-correlation) factor.
InfluenceFactor influence_factor(const bath::MemoryKernel& kernel, int lag);

// All pair factors for lags 0..max_lag.
std::vector<InfluenceFactor> influence_factors(const bath::MemoryKernel& kernel);

// One tensor-train core.  Storage is a (chi_l) x (4 * chi_r) matrix whose
// column block c (c = coupling class, 0..3) is the chi_l x chi_r bond matrix
// for that class: m(a_l, a_r + chi_r * c).
struct PtCore {
  Eigen::MatrixXcd m;
  int chi_l = 1;
  int chi_r = 1;

  Eigen::Ref<Eigen::MatrixXcd> slice(int cls) { return m.middleCols(static_cast<Eigen::Index>(cls) * chi_r, chi_r); }
  Eigen::Ref<const Eigen::MatrixXcd> slice(int cls) const {
    return m.middleCols(static_cast<Eigen::Index>(cls) * chi_r, chi_r);
  }
};

struct ProcessTensor {
  double dt = 0.0;
  int steps = 0;               // number of cores == number of full time steps
  int memory_steps = 0;        // pair-factor depth used during the build
  double svd_cutoff = 0.0;     // relative singular-value threshold
  std::vector<PtCore> cores;

  int max_bond() const;
  std::vector<int> bond_dims() const;  // chi_r of each core, size steps
  void validate() const;               // bond consistency between neighbours
};

struct BuildOptions {
  double svd_cutoff = 1e-7;  // discard singular values below cutoff * sigma_max
  int bond_cap = 512;        // abort with ResourceError if a bond would exceed this
};

// Build the influence-functional tensor train for `steps` time slices.
ProcessTensor build_process_tensor(const bath::MemoryKernel& kernel, int steps,
                                   const BuildOptions& opts = {});

// Dense influence functional over all 9^steps paths; oracle-sized inputs only
// (steps <= 6).  Index order: flat = sum_i alpha_i * 9^i (slice 0 fastest).
Eigen::VectorXcd dense_influence_functional(const bath::MemoryKernel& kernel, int steps);

// Contract a dense path-sum influence vector exactly (oracle for small steps).
Eigen::VectorXcd brute_force_populations_vector(const bath::MemoryKernel& kernel,
                                                const sys::Propagators& props,
                                                const Eigen::Matrix3cd& rho0, int steps);

struct PopulationSeries {
  double dt = 0.0;
  std::vector<double> t;                  // size steps + 1
  std::vector<Eigen::Matrix3cd> rho;      // reduced density matrices on the grid
  std::vector<double> cavity_population;  // <a^dag a>
  std::vector<double> exciton_population; // <|X><X|>
  double max_trace_deviation = 0.0;       // max |Tr rho - 1| over the grid
  double max_hermiticity_deviation = 0.0; // max entry of |rho - rho^dag|
};

// Reduced-state evolution: rho(t_n) for n = 0..steps.  The propagators must
// share the tensor-train time step.
PopulationSeries propagate_populations(const ProcessTensor& tensor, const sys::Propagators& props,
                                       const Eigen::Matrix3cd& rho0, int steps);
PopulationSeries propagate_populations(const ProcessTensor& tensor, const sys::SystemParams& params,
                                       const Eigen::Matrix3cd& rho0);

struct CorrelationGrid {
  double dt = 0.0;
  int steps = 0;
  // g(i, j) = <a^dag(t_i) a(t_j)> for i >= j; upper triangle filled by
  // Hermitian completion.  Size (steps+1) x (steps+1).
  Eigen::MatrixXcd g;
};

// Two-time cavity correlation grid <a^dag(t_i) a(t_j)> with the environment
// carried exactly through both evolution intervals.
CorrelationGrid two_time_correlation_grid(const ProcessTensor& tensor, const sys::Propagators& props,
                                          const Eigen::Matrix3cd& rho0, int steps);
CorrelationGrid two_time_correlation_grid(const ProcessTensor& tensor, const sys::SystemParams& params,
                                          const Eigen::Matrix3cd& rho0);

// --- binary cache -----------------------------------------------------------

std::uint64_t cache_key(const bath::BathSpec& spec, double dt, int steps, const BuildOptions& opts);

void save_process_tensor(const ProcessTensor& tensor, const std::filesystem::path& file,
                         std::uint64_t key);
std::optional<ProcessTensor> load_process_tensor(const std::filesystem::path& file,
                                                 std::uint64_t key);

}  // namespace ptqed::pt
