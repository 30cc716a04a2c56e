#pragma once

#include "grid.hpp"
#include "lp.hpp"
#include "trace_ext.hpp"

#include <string>
#include <vector>

namespace tracelab {

/// Matrix-valued field on the boundary grid: rows x cols per node, row-major.
struct MatrixField {
    Grid grid;
    int rows = 1, cols = 1;
    std::vector<cplx> v;

    MatrixField() = default;
    MatrixField(Grid g, int rows_, int cols_);
    static MatrixField constant(const Grid& g, int rows, int cols, const std::vector<cplx>& entries);
    static MatrixField identity(const Grid& g, int n);
    const cplx* at(std::size_t node) const { return &v[node * rows * cols]; }
    cplx* at(std::size_t node) { return &v[node * rows * cols]; }
    double sup_norm() const;  // max over nodes of the spectral norm
    bool zero() const;
};

/// y(node) = M(node) x(node).
GridFunction apply_field(const MatrixField& m, const GridFunction& x);

struct BoundaryTerm {
    int j = 0;                 // normal order: acts on Tr_j
    std::vector<int> tangential;  // tangential multi-index (length d-1)
    MatrixField coeff;
};

/// B = sum_terms coeff * d~^alpha Tr_j. Order m = max(j + |alpha|).
class BoundaryOperator {
public:
    BoundaryOperator(int r, int rows, std::vector<BoundaryTerm> terms);
    static BoundaryOperator trace_op(const Grid& bgrid, int r, int j);

    int order() const { return m_; }
    int r() const { return r_; }
    int rows() const { return rows_; }
    const std::vector<BoundaryTerm>& terms() const { return terms_; }
    /// The coefficient of Tr_m without tangential derivatives.
    const MatrixField& leading() const;

    /// Apply the terms with j in [jlo, jhi] to the spectrum of f.
    GridFunction apply(const Spectrum& f, int jlo = 0, int jhi = 1 << 20) const;
    GridFunction apply(const GridFunction& f) const;

private:
    int r_, rows_, m_ = 0;
    std::vector<BoundaryTerm> terms_;
    int lead_ = -1;
};

/// Normal system B^{m_0}, ..., B^{m_n} with coretractions of the leading coefficients.
class NormalSystem {
public:
    /// Empty coretractions request the pointwise Moore-Penrose pseudoinverse.
    NormalSystem(std::vector<BoundaryOperator> ops, std::vector<MatrixField> coretractions = {});

    int size() const { return static_cast<int>(ops_.size()); }
    int r() const { return ops_.front().r(); }
    const BoundaryOperator& op(int i) const { return ops_[static_cast<std::size_t>(i)]; }
    const MatrixField& coretraction(int i) const { return bc_[static_cast<std::size_t>(i)]; }
    const MatrixField& projection(int i) const { return pi_[static_cast<std::size_t>(i)]; }
    std::vector<int> orders() const;
    /// Index i with m_i == j, or -1.
    int index_of_order(int j) const;
    double right_inverse_residual() const { return rinv_res_; }
    double projection_residual() const { return proj_res_; }

private:
    std::vector<BoundaryOperator> ops_;
    std::vector<MatrixField> bc_, pi_;
    double rinv_res_ = 0.0, proj_res_ = 0.0;
};

/// Pointwise pseudoinverse with full-row-rank check (threshold 1e-8 ||b||).
MatrixField pseudo_inverse(const MatrixField& b);

/// Right inverse of the system: B^{m_i} ext_B(g) = g_i, Tr_j ext_B(g) = 0 for skipped j < m_n.
GridFunction ext_boundary(const NormalSystem& sys, const std::vector<GridFunction>& g, const EtaFamily& eta,
                          const LpSystem& bsys, double tol = 1e-10);

/// C^0..C^a applied to v: (1 - pi_j) Tr_j + b^c B^{m_i} for j = m_i, Tr_j otherwise.
std::vector<GridFunction> extended_system_apply(const NormalSystem& sys, int a, const GridFunction& v);
/// b^c_i B^{m_i} v.
GridFunction reduced_apply(const NormalSystem& sys, int i, const GridFunction& v);

struct KernelReport {
    double c_residual = 0.0;      // max_j ||C^j v||_2
    double trace_residual = 0.0;  // max_j ||Tr_j v||_2
    bool c_small = false;
    bool traces_small = false;
    bool agree() const { return c_small == traces_small; }
};
KernelReport kernel_equiv_check(const NormalSystem& sys, int a, const GridFunction& v, double threshold);

/// JSON descriptor: {"r":R, "operators":[{"rows":k, "terms":[{"j":J, "alpha":[..],
/// "coeff": "file.wtlb" | [[re,im],...]}]}], "coretraction": "auto" | ["file.wtlb", ...]}.
/// Files are resolved relative to `base_dir`; inline coefficients are constant fields.
NormalSystem load_normal_system(const std::string& json_text, const Grid& bgrid, const std::string& base_dir);

}  // namespace tracelab
