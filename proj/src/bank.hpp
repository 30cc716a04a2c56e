#pragma once

#include "grid.hpp"
#include "lp.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace tracelab {

/// Modulated Gaussian amp * exp(-sum_a (x_a - c_a)^2 / (2 sigma_a^2)) * exp(i omega . x)
/// in fiber component `comp`.
struct Atom {
    cplx amp{1.0, 0.0};
    std::vector<double> center, sigma, omega;
    int comp = 0;
};

struct BankMember {
    std::string id;
    std::string kind;  // block | bump | dilate | boundary
    std::vector<Atom> atoms;
    GridFunction f;
};

struct BankConfig {
    Grid grid;
    int blocks = 8;          // tail beyond block N must vanish
    int size = 50;
    std::uint64_t seed = 7;
    int r = 1;
    int boundary_jmax = 6;   // boundary bumps at distance 2^-j, j <= jmax
    double tail_tol = 1e-12;
    double margin = 0.25;
    /// Restrict to these kinds (empty: all four, cycled).
    std::vector<std::string> kinds;
};

/// Sample atoms on a grid.
GridFunction sample_atoms(const Grid& g, int r, const std::vector<Atom>& atoms);
/// Atoms of f(lambda x).
std::vector<Atom> dilate_atoms(std::vector<Atom> atoms, double lambda);
/// Atoms of f(x - shift e_1).
std::vector<Atom> translate_atoms(std::vector<Atom> atoms, double shift);

/// Relative l2 spectral mass where phi(2^-N xi) < 1 (beyond block N).
double block_tail(const GridFunction& f, const LpGenerator& gen, int N);

/// Deterministic bank (mt19937_64). Throws Arg when a member misses the tail
/// or support-margin contract, naming the member.
std::vector<BankMember> generate_bank(const BankConfig& cfg);

/// Writes each member as <id>.wtlb plus manifest.json into `dir` (created if missing).
void write_bank(const std::vector<BankMember>& bank, const BankConfig& cfg, const std::string& dir);

}  // namespace tracelab
