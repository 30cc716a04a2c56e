#include "boundary.hpp"

#include "errors.hpp"
#include "fft.hpp"
#include "norms.hpp"
#include "spectral.hpp"

#include <Eigen/Dense>
#include <json.hpp>

#include <filesystem>
#include <map>

namespace tracelab {

using MatC = Eigen::Matrix<cplx, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

MatrixField::MatrixField(Grid g, int rows_, int cols_) : grid(std::move(g)), rows(rows_), cols(cols_) {
    if (rows < 1 || cols < 1) throw Error(Status::Arg, "matrix field dimensions must be >= 1");
    v.assign(grid.size() * static_cast<std::size_t>(rows * cols), 0.0);
}

MatrixField MatrixField::constant(const Grid& g, int rows, int cols, const std::vector<cplx>& e) {
    if (static_cast<int>(e.size()) != rows * cols) throw Error(Status::Arg, "constant matrix has wrong entry count");
    MatrixField m(g, rows, cols);
    for (std::size_t k = 0; k < g.size(); ++k) std::copy(e.begin(), e.end(), m.at(k));
    return m;
}

MatrixField MatrixField::identity(const Grid& g, int n) {
    std::vector<cplx> e(static_cast<std::size_t>(n * n), 0.0);
    for (int i = 0; i < n; ++i) e[static_cast<std::size_t>(i * n + i)] = 1.0;
    return constant(g, n, n, e);
}

double MatrixField::sup_norm() const {
    double s = 0.0;
    for (std::size_t k = 0; k < grid.size(); ++k) {
        Eigen::Map<const MatC> M(at(k), rows, cols);
        Eigen::JacobiSVD<MatC> svd(M);
        s = std::max(s, svd.singularValues()(0));
    }
    return s;
}

bool MatrixField::zero() const {
    for (const auto& z : v)
        if (z != 0.0) return false;
    return true;
}

GridFunction apply_field(const MatrixField& m, const GridFunction& x) {
    if (!(m.grid == x.grid) || m.cols != x.r) throw Error(Status::Arg, "fiber-dim mismatch in coefficient product");
    GridFunction y(x.grid, m.rows);
    for (std::size_t k = 0; k < x.nodes(); ++k) {
        const cplx* M = m.at(k);
        for (int i = 0; i < m.rows; ++i) {
            cplx acc = 0.0;
            for (int j = 0; j < m.cols; ++j) acc += M[i * m.cols + j] * x.at(k, j);
            y.at(k, i) = acc;
        }
    }
    return y;
}

// ---- BoundaryOperator ------------------------------------------------------

BoundaryOperator::BoundaryOperator(int r, int rows, std::vector<BoundaryTerm> terms)
    : r_(r), rows_(rows), terms_(std::move(terms)) {
    if (terms_.empty()) throw Error(Status::Arg, "boundary operator without terms");
    const Grid& g = terms_.front().coeff.grid;
    int top_nonzero = -1;
    for (std::size_t t = 0; t < terms_.size(); ++t) {
        const auto& term = terms_[t];
        if (!(term.coeff.grid == g)) throw Error(Status::Arg, "coefficient fields on different grids");
        if (term.coeff.rows != rows_ || term.coeff.cols != r_)
            throw Error(Status::Arg, "fiber-dim mismatch: coefficient must be rows x r");
        if (static_cast<int>(term.tangential.size()) != g.dim())
            throw Error(Status::Arg, "tangential multi-index length must be d-1");
        if (term.j < 0) throw Error(Status::Arg, "negative normal order");
        int ord = term.j;
        for (int a : term.tangential) {
            if (a < 0) throw Error(Status::Arg, "negative tangential order");
            ord += a;
        }
        m_ = std::max(m_, ord);
        if (!term.coeff.zero()) top_nonzero = std::max(top_nonzero, ord);
    }
    if (top_nonzero != m_) throw Error(Status::Arg, "every order-m coefficient vanishes identically");
    for (std::size_t t = 0; t < terms_.size(); ++t) {
        const auto& term = terms_[t];
        bool flat = true;
        for (int a : term.tangential) flat = flat && a == 0;
        if (term.j == m_ && flat) {
            if (lead_ >= 0) throw Error(Status::Arg, "duplicate leading term");
            lead_ = static_cast<int>(t);
        }
    }
}

BoundaryOperator BoundaryOperator::trace_op(const Grid& bgrid, int r, int j) {
    BoundaryTerm t;
    t.j = j;
    t.tangential.assign(static_cast<std::size_t>(bgrid.dim()), 0);
    t.coeff = MatrixField::identity(bgrid, r);
    return BoundaryOperator(r, r, {t});
}

const MatrixField& BoundaryOperator::leading() const {
    if (lead_ < 0) throw Error(Status::Arg, "operator has no leading Tr_m coefficient");
    return terms_[static_cast<std::size_t>(lead_)].coeff;
}

GridFunction BoundaryOperator::apply(const Spectrum& f, int jlo, int jhi) const {
    if (f.r != r_) throw Error(Status::Arg, "fiber-dim mismatch: function has r = " + std::to_string(f.r));
    Grid bg = f.grid.boundary();
    if (!(bg == terms_.front().coeff.grid)) throw Error(Status::Arg, "coefficient grid is not the boundary grid");
    GridFunction out(bg, rows_);
    std::map<int, Spectrum> traces;
    for (const auto& term : terms_) {
        if (term.j < jlo || term.j > jhi) continue;
        auto it = traces.find(term.j);
        if (it == traces.end()) it = traces.emplace(term.j, trace_spectrum(f, term.j)).first;
        Spectrum t = it->second;
        differentiate(t, term.tangential);
        out += apply_field(term.coeff, from_coeffs(t));
    }
    return out;
}

GridFunction BoundaryOperator::apply(const GridFunction& f) const { return apply(to_coeffs(f)); }

// ---- NormalSystem ----------------------------------------------------------

MatrixField pseudo_inverse(const MatrixField& b) {
    MatrixField out(b.grid, b.cols, b.rows);
    for (std::size_t k = 0; k < b.grid.size(); ++k) {
        Eigen::Map<const MatC> B(b.at(k), b.rows, b.cols);
        Eigen::JacobiSVD<MatC> svd(B);
        const auto& sv = svd.singularValues();
        double top = sv.size() ? sv(0) : 0.0;
        if (sv.size() < b.rows || !(sv(b.rows - 1) > 1e-8 * top))
            throw Error(Status::Numeric, "leading coefficient lacks full row rank at boundary node " + std::to_string(k));
        MatC Bs = B.adjoint();
        MatC P = Bs * (B * Bs).inverse();
        Eigen::Map<MatC>(out.at(k), b.cols, b.rows) = P;
    }
    return out;
}

NormalSystem::NormalSystem(std::vector<BoundaryOperator> ops, std::vector<MatrixField> coretractions)
    : ops_(std::move(ops)) {
    if (ops_.empty()) throw Error(Status::Arg, "empty normal system");
    for (std::size_t i = 0; i < ops_.size(); ++i) {
        if (ops_[i].r() != ops_.front().r()) throw Error(Status::Arg, "operators act on different fibers");
        if (i && ops_[i].order() <= ops_[i - 1].order()) throw Error(Status::Arg, "orders must be strictly increasing");
        if (ops_[i].order() > 4) throw Error(Status::Arg, "orders are capped at 4");
    }
    if (!coretractions.empty() && coretractions.size() != ops_.size())
        throw Error(Status::Arg, "one coretraction per operator required");
    for (std::size_t i = 0; i < ops_.size(); ++i) {
        const MatrixField& b = ops_[i].leading();
        MatrixField bc = coretractions.empty() ? pseudo_inverse(b) : coretractions[i];
        if (!(bc.grid == b.grid) || bc.rows != b.cols || bc.cols != b.rows)
            throw Error(Status::Arg, "coretraction shape mismatch");
        MatrixField pi(b.grid, b.cols, b.cols);
        for (std::size_t k = 0; k < b.grid.size(); ++k) {
            Eigen::Map<const MatC> B(b.at(k), b.rows, b.cols);
            Eigen::Map<const MatC> C(bc.at(k), bc.rows, bc.cols);
            MatC I = B * C;
            rinv_res_ = std::max(rinv_res_, (I - MatC::Identity(b.rows, b.rows)).cwiseAbs().maxCoeff());
            MatC P = C * B;
            proj_res_ = std::max(proj_res_, (P * P - P).cwiseAbs().maxCoeff());
            Eigen::Map<MatC>(pi.at(k), b.cols, b.cols) = P;
        }
        bc_.push_back(std::move(bc));
        pi_.push_back(std::move(pi));
    }
    if (rinv_res_ > 1e-12) throw Error(Status::Numeric, "coretraction is not a right inverse of the leading coefficient");
    if (proj_res_ > 1e-11) throw Error(Status::Numeric, "b^c b is not a projection");
}

std::vector<int> NormalSystem::orders() const {
    std::vector<int> o;
    for (const auto& op : ops_) o.push_back(op.order());
    return o;
}

int NormalSystem::index_of_order(int j) const {
    for (std::size_t i = 0; i < ops_.size(); ++i)
        if (ops_[i].order() == j) return static_cast<int>(i);
    return -1;
}

GridFunction ext_boundary(const NormalSystem& sys, const std::vector<GridFunction>& g, const EtaFamily& eta,
                          const LpSystem& bsys, double tol) {
    if (static_cast<int>(g.size()) != sys.size()) throw Error(Status::Arg, "one boundary datum per operator required");
    for (int i = 0; i < sys.size(); ++i)
        if (g[static_cast<std::size_t>(i)].r != sys.op(i).rows())
            throw Error(Status::Arg, "fiber-dim mismatch in boundary datum " + std::to_string(i));
    const int top = sys.orders().back();
    Spectrum F(eta.grid(), sys.r());
    for (int j = 0; j <= top; ++j) {
        GridFunction rhs = from_coeffs(trace_spectrum(F, j));
        rhs = cplx(-1.0) * rhs;
        int i = sys.index_of_order(j);
        if (i >= 0) {
            const MatrixField& bc = sys.coretraction(i);
            rhs += apply_field(bc, g[static_cast<std::size_t>(i)]);
            if (j > 0) rhs -= apply_field(bc, sys.op(i).apply(F, 0, j - 1));
        }
        F += ext_m_spectrum(to_coeffs(rhs), j, eta, bsys, tol);
    }
    return from_coeffs(F);
}

GridFunction reduced_apply(const NormalSystem& sys, int i, const GridFunction& v) {
    return apply_field(sys.coretraction(i), sys.op(i).apply(v));
}

std::vector<GridFunction> extended_system_apply(const NormalSystem& sys, int a, const GridFunction& v) {
    if (a < sys.orders().back()) throw Error(Status::Arg, "extended system needs a >= m_n");
    Spectrum V = to_coeffs(v);
    std::vector<GridFunction> out;
    for (int j = 0; j <= a; ++j) {
        GridFunction tr = from_coeffs(trace_spectrum(V, j));
        int i = sys.index_of_order(j);
        if (i < 0) {
            out.push_back(std::move(tr));
            continue;
        }
        GridFunction c = tr - apply_field(sys.projection(i), tr);
        c += apply_field(sys.coretraction(i), sys.op(i).apply(V));
        out.push_back(std::move(c));
    }
    return out;
}

namespace {

/// Grid l2 norm sqrt(sum |v|^2 * cell volume); residuals sit at roundoff level
/// everywhere, so the support-margin contract of lp_norm does not apply.
double grid_l2(const GridFunction& f) {
    double cell = 1.0;
    for (int a = 0; a < f.grid.dim(); ++a) cell *= f.grid.h(a);
    std::vector<double> sq(f.v.size());
    for (std::size_t i = 0; i < f.v.size(); ++i) sq[i] = std::norm(f.v[i]);
    return std::sqrt(pairwise_sum(sq.data(), sq.size()) * cell);
}

}  // namespace

KernelReport kernel_equiv_check(const NormalSystem& sys, int a, const GridFunction& v, double threshold) {
    KernelReport rep;
    Spectrum V = to_coeffs(v);
    for (const auto& c : extended_system_apply(sys, a, v)) rep.c_residual = std::max(rep.c_residual, grid_l2(c));
    for (int j = 0; j <= a; ++j)
        rep.trace_residual = std::max(rep.trace_residual, grid_l2(from_coeffs(trace_spectrum(V, j))));
    rep.c_small = rep.c_residual <= threshold;
    rep.traces_small = rep.trace_residual <= threshold;
    return rep;
}

// ---- JSON descriptor -------------------------------------------------------

NormalSystem load_normal_system(const std::string& text, const Grid& bgrid, const std::string& base_dir) {
    using nlohmann::json;
    json j;
    try {
        j = json::parse(text);
    } catch (const std::exception& e) {
        throw Error(Status::Parse, std::string("boundary system JSON: ") + e.what());
    }
    auto resolve = [&](const std::string& p) {
        std::filesystem::path fp(p);
        return fp.is_absolute() ? fp.string() : (std::filesystem::path(base_dir) / fp).string();
    };
    auto field_from = [&](const json& spec, int rows, int cols) {
        if (spec.is_string()) {
            GridFunction gf = load_grid_function(resolve(spec.get<std::string>()));
            if (!(gf.grid == bgrid) || gf.r != rows * cols)
                throw Error(Status::Arg, "coefficient file does not match boundary grid or shape");
            MatrixField m(bgrid, rows, cols);
            m.v = gf.v;
            return m;
        }
        std::vector<cplx> e;
        for (const auto& z : spec) {
            if (z.is_array()) e.emplace_back(z.at(0).get<double>(), z.at(1).get<double>());
            else e.emplace_back(z.get<double>(), 0.0);
        }
        return MatrixField::constant(bgrid, rows, cols, e);
    };
    try {
        int r = j.at("r").get<int>();
        std::vector<BoundaryOperator> ops;
        for (const auto& op : j.at("operators")) {
            int rows = op.at("rows").get<int>();
            std::vector<BoundaryTerm> terms;
            for (const auto& t : op.at("terms")) {
                BoundaryTerm bt;
                bt.j = t.at("j").get<int>();
                bt.tangential = t.value("alpha", std::vector<int>(static_cast<std::size_t>(bgrid.dim()), 0));
                bt.coeff = field_from(t.at("coeff"), rows, r);
                terms.push_back(std::move(bt));
            }
            ops.emplace_back(r, rows, std::move(terms));
        }
        std::vector<MatrixField> bc;
        if (j.contains("coretraction") && j["coretraction"].is_array()) {
            std::size_t i = 0;
            for (const auto& c : j["coretraction"]) {
                if (i >= ops.size()) throw Error(Status::Arg, "too many coretractions");
                bc.push_back(field_from(c, r, ops[i].rows()));
                ++i;
            }
        }
        return NormalSystem(std::move(ops), std::move(bc));
    } catch (const json::exception& e) {
        throw Error(Status::Parse, std::string("boundary system JSON: ") + e.what());
    }
}

}  // namespace tracelab
