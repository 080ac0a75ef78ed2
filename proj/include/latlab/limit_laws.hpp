#pragma once

#include <utility>
#include <vector>

namespace latlab {

// log of the surface area of the unit sphere in R^n, 2 pi^(n/2) / Gamma(n/2)
double log_sphere_surface(int n);

// The plain value underflows to 0 in double around n ~ 700; every internal
// consumer uses the log-domain ratio below instead.
double sphere_surface(int n);

// omega_{n-1} / omega_n, stable for n up to at least 10^7
double sphere_surface_ratio(int n);

// Limiting CDF of the N-th normalized ball volume:
// 1 - e^{-V/2} * sum_{k<N} (V/2)^k / k!
double poisson_gap_cdf(int N, double V);

// CDF of |N(0,1)|: erf(c / sqrt 2)
double half_normal_cdf(double c);

double std_normal_cdf(double x);

// (1/2) erf(C / sqrt 2): the large-n limit of the angle mass within C/sqrt(n)
// of orthogonality
double concentration_limit(double C);

// (omega_{n-1}/omega_n) * integral_{phi1}^{phi2} sin^{n-2}(phi) dphi.
// Probability that two independent uniform directions in R^n meet at an angle
// inside [phi1, phi2]. Adaptive quadrature, absolute error well under 1e-10.
double finite_n_angle_mass(int n, double phi1, double phi2);

// Main term of the expected number of unordered pairs of +-vector pairs with
// both ball volumes <= V and symmetrized angle in [phi1, phi2]:
// (V^2/4) * (omega_{n-1}/omega_n) * integral sin^{n-2}
double rogers_pair_expectation(int n, double V, double phi1, double phi2);

// Expected number of ordered k-tuples of distinct points of a Poisson(1/2)
// process falling in the given product box: 2^{-k} * prod(lengths)
double campbell_box_expectation(int k, const std::vector<std::pair<double, double>>& box);

// Triangular unit-vector chart: u_1 = e_1 and u_j has i-th coordinate
// cos(phi_ij) * prod_{l<i} sin(phi_lj), last nonzero coordinate the full sin
// product. phis is k x k, used strictly above the diagonal.
std::vector<std::vector<double>> chart_unit_vectors(const std::vector<std::vector<double>>& phis, int k);

// alpha_ij = arccos(u_i . u_j); alpha_1j = phi_1j identically
std::vector<std::vector<double>> chart_to_angles(const std::vector<std::vector<double>>& phis, int k);

// prod_{i<j} (sin phi_ij)^(k-i) / sin(alpha_ij), 1-based i.
// Throws std::runtime_error("chart degenerate") if any alpha hits 0 or pi.
double chart_jacobian_det(const std::vector<std::vector<double>>& phis, int k);

// Generic adaptive Simpson integration, exposed for oracle tests.
double integrate(const std::vector<double>& splits, double (*f)(double, const void*), const void* ctx,
                 double eps);

}  // namespace latlab
