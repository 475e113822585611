#include "strata/hodge.hpp"

#include <cmath>

#include <Eigen/SVD>
#include <Eigen/SparseCholesky>
#include <Eigen/SparseCore>

#include <json.hpp>

namespace strata {

namespace {

// least-squares covector over one face; exact interpolation when the three
// slot values sum to zero
void ls_covector(const Mesh& M, int f, const std::array<Complex, 3>& v, Complex& alpha, Complex& beta,
                 double& residual) {
    Complex n00 = 0, n01 = 0, r0 = 0, r1 = 0;
    for (int i = 0; i < 3; ++i) {
        Complex d = M.slot_vector(f, i);
        n00 += std::norm(d);
        n01 += std::conj(d) * std::conj(d);
        r0 += std::conj(d) * v[i];
        r1 += d * v[i];
    }
    // normal equations [[n00, n01],[conj(n01), n00]] [alpha;beta] = [r0;r1]
    Complex det = n00 * n00 - n01 * std::conj(n01);
    alpha = (n00 * r0 - n01 * r1) / det;
    beta = (n00 * r1 - std::conj(n01) * r0) / det;
    residual = 0;
    for (int i = 0; i < 3; ++i) {
        Complex d = M.slot_vector(f, i);
        residual = std::max(residual, std::abs(alpha * d + beta * std::conj(d) - v[i]));
    }
}

Eigen::VectorXd cotan_weights(const Mesh& M) {
    Eigen::VectorXd w = Eigen::VectorXd::Zero(M.edges.size());
    for (size_t f = 0; f < M.faces.size(); ++f)
        for (int i = 0; i < 3; ++i) {
            // corner opposite slot i
            int k = (i + 2) % 3;
            Complex a = M.faces[f].chart[i] - M.faces[f].chart[k];
            Complex b = M.faces[f].chart[(i + 1) % 3] - M.faces[f].chart[k];
            double crossab = a.real() * b.imag() - a.imag() * b.real();
            double dotab = a.real() * b.real() + a.imag() * b.imag();
            w[M.faces[f].edge[i]] += 0.5 * dotab / crossab;
        }
    return w;
}

} // namespace

OneForm make_oneform(const Mesh& M, Eigen::VectorXcd edge_values) {
    OneForm f;
    f.values = std::move(edge_values);
    if (f.values.size() != static_cast<Eigen::Index>(M.edges.size()))
        throw Error(Err::Internal, "cochain size mismatch");
    f.alpha.resize(M.faces.size());
    f.beta.resize(M.faces.size());
    f.closedness_defect = 0;
    f.reconstruction_residual = 0;
    for (size_t fi = 0; fi < M.faces.size(); ++fi) {
        int ff = static_cast<int>(fi);
        std::array<Complex, 3> v;
        Complex sum = 0;
        for (int i = 0; i < 3; ++i) {
            v[i] = double(M.faces[ff].edge_sign[i]) * f.values[M.faces[ff].edge[i]];
            sum += v[i];
        }
        f.closedness_defect = std::max(f.closedness_defect, std::abs(sum));
        double res;
        ls_covector(M, ff, v, f.alpha[ff], f.beta[ff], res);
        f.reconstruction_residual = std::max(f.reconstruction_residual, res);
    }
    return f;
}

OneForm covector_form(const Mesh& M, Eigen::VectorXcd alpha, Eigen::VectorXcd beta) {
    OneForm f;
    f.has_cochain = false;
    f.alpha = std::move(alpha);
    f.beta = std::move(beta);
    if (f.alpha.size() != static_cast<Eigen::Index>(M.faces.size()) || f.beta.size() != f.alpha.size())
        throw Error(Err::Internal, "covector size mismatch");
    return f;
}

OneForm conjugate_form(const Mesh& M, const OneForm& f) {
    OneForm g;
    g.has_cochain = f.has_cochain;
    if (f.has_cochain) return make_oneform(M, f.values.conjugate());
    g.alpha = f.beta.conjugate();
    g.beta = f.alpha.conjugate();
    return g;
}

OneForm scale_form(const OneForm& f, Complex s) {
    OneForm g = f;
    if (g.has_cochain) g.values *= s;
    g.alpha *= s;
    g.beta *= s;
    g.closedness_defect *= std::abs(s);
    g.reconstruction_residual *= std::abs(s);
    return g;
}

OneForm add_forms(const Mesh& M, const OneForm& a, const OneForm& b, Complex ca, Complex cb) {
    if (a.has_cochain && b.has_cochain) return make_oneform(M, ca * a.values + cb * b.values);
    OneForm g;
    g.has_cochain = false;
    g.alpha = ca * a.alpha + cb * b.alpha;
    g.beta = ca * a.beta + cb * b.beta;
    return g;
}

std::pair<OneForm, OneForm> type_decompose(const Mesh& M, const OneForm& f) {
    Eigen::VectorXcd zero = Eigen::VectorXcd::Zero(M.faces.size());
    OneForm p = covector_form(M, f.alpha, zero);
    OneForm q = covector_form(M, zero, f.beta);
    return {p, q};
}

double hodge_norm(const Mesh& M, const OneForm& f) {
    double s = 0;
    for (size_t ff = 0; ff < M.faces.size(); ++ff)
        s += M.face_area(static_cast<int>(ff)) * (std::norm(f.alpha[ff]) + std::norm(f.beta[ff]));
    return std::sqrt(s);
}

Complex hodge_inner(const Mesh& M, const OneForm& f, const OneForm& g) {
    Complex s = 0;
    for (size_t ff = 0; ff < M.faces.size(); ++ff)
        s += M.face_area(static_cast<int>(ff)) *
             (f.alpha[ff] * std::conj(g.alpha[ff]) + f.beta[ff] * std::conj(g.beta[ff]));
    return s;
}

double codifferential_norm(const Mesh& M, const OneForm& f) {
    if (!f.has_cochain) throw Error(Err::Internal, "codifferential needs a cochain");
    Eigen::VectorXd w = cotan_weights(M);
    Eigen::VectorXcd delta = Eigen::VectorXcd::Zero(M.vertices.size());
    for (size_t e = 0; e < M.edges.size(); ++e) {
        delta[M.edges[e].v1] += w[e] * f.values[e];
        delta[M.edges[e].v0] -= w[e] * f.values[e];
    }
    return delta.cwiseAbs().maxCoeff();
}

OneForm harmonic_representative(const Mesh& M, const OneForm& c) {
    if (!c.has_cochain) throw Error(Err::Internal, "harmonic solve needs a cochain");
    double scale = std::max(1.0, c.values.cwiseAbs().maxCoeff());
    if (c.closedness_defect > 1e-9 * scale)
        throw Error(Err::NotClosed, "input cochain is not closed");

    int V = static_cast<int>(M.vertices.size());
    Eigen::VectorXd w = cotan_weights(M);

    // cotan Laplacian with vertex 0 pinned
    std::vector<Eigen::Triplet<double>> trips;
    Eigen::VectorXcd rhs = Eigen::VectorXcd::Zero(V);
    for (size_t e = 0; e < M.edges.size(); ++e) {
        int u = M.edges[e].v0, v = M.edges[e].v1;
        trips.emplace_back(u, u, w[e]);
        trips.emplace_back(v, v, w[e]);
        trips.emplace_back(u, v, -w[e]);
        trips.emplace_back(v, u, -w[e]);
        rhs[v] += w[e] * c.values[e];
        rhs[u] -= w[e] * c.values[e];
    }
    trips.emplace_back(0, 0, 1e3); // pin the constant mode
    Eigen::SparseMatrix<double> L(V, V);
    L.setFromTriplets(trips.begin(), trips.end());
    Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> solver(L);
    if (solver.info() != Eigen::Success) throw Error(Err::SolverFailure, "cotan factorization failed");
    Eigen::VectorXd fr = solver.solve(rhs.real());
    Eigen::VectorXd fi = solver.solve(rhs.imag());
    if (solver.info() != Eigen::Success) throw Error(Err::SolverFailure, "cotan solve failed");
    Eigen::VectorXcd pot = fr + Complex(0, 1) * fi;

    Eigen::VectorXcd vals = c.values;
    for (size_t e = 0; e < M.edges.size(); ++e) vals[e] -= pot[M.edges[e].v1] - pot[M.edges[e].v0];
    OneForm out = make_oneform(M, std::move(vals));
    if (codifferential_norm(M, out) > 1e-7 * scale)
        throw Error(Err::SolverFailure, "harmonic residual too large");
    return out;
}

HarmonicBasis harmonic_basis(const Mesh& M) {
    HarmonicBasis B;
    B.homology = homology_basis(M);
    int n = static_cast<int>(B.homology.cycles.size());
    B.periods.resize(n, n);
    for (int k = 0; k < n; ++k) {
        OneForm c = make_oneform(M, B.homology.dual_cochains[k]);
        B.forms.push_back(harmonic_representative(M, c));
        for (int m = 0; m < n; ++m)
            B.periods(k, m) = cochain_period(M, B.forms[k].values, B.homology.cycles[m]);
    }
    B.gram.resize(n, n);
    for (int k = 0; k < n; ++k)
        for (int m = 0; m < n; ++m) B.gram(k, m) = hodge_inner(M, B.forms[k], B.forms[m]);
    return B;
}

namespace {

// Split a list of harmonic forms by type: returns coefficient vectors whose
// combinations minimize the (0,1) energy (count of them = want), via SVD of
// the area-weighted beta matrix.
Eigen::MatrixXcd min_beta_combinations(const Mesh& M, const std::vector<OneForm>& forms, int want,
                                       double* gap_out) {
    int n = static_cast<int>(forms.size());
    Eigen::MatrixXcd B(M.faces.size(), n);
    for (int k = 0; k < n; ++k)
        for (size_t f = 0; f < M.faces.size(); ++f)
            B(static_cast<Eigen::Index>(f), k) =
                std::sqrt(M.face_area(static_cast<int>(f))) * forms[k].beta[static_cast<Eigen::Index>(f)];
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(B, Eigen::ComputeFullV);
    const auto& sv = svd.singularValues();
    if (gap_out) {
        if (want < n) {
            double small_max = sv[n - want];  // largest of the minimized tail
            double large_min = sv[n - want - 1];
            *gap_out = small_max / std::max(large_min, 1e-300);
        } else {
            *gap_out = 0;
        }
    }
    return svd.matrixV().rightCols(want);
}

// Hodge-orthonormalize combinations of the given forms; phases fixed by the
// first sizable covector entry.
std::vector<OneForm> orthonormal_forms(const Mesh& M, const std::vector<OneForm>& forms,
                                       const Eigen::MatrixXcd& combos) {
    int n = static_cast<int>(forms.size());
    int m = static_cast<int>(combos.cols());
    std::vector<OneForm> cand;
    for (int j = 0; j < m; ++j) {
        OneForm acc = scale_form(forms[0], combos(0, j));
        for (int k = 1; k < n; ++k) acc = add_forms(M, acc, forms[k], 1.0, combos(k, j));
        cand.push_back(acc);
    }
    Eigen::MatrixXcd G(m, m);
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j) G(i, j) = hodge_inner(M, cand[i], cand[j]);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(G);
    if (eig.eigenvalues().minCoeff() < 1e-10 * eig.eigenvalues().maxCoeff())
        throw Error(Err::RankDeficient, "degenerate Gram matrix");
    Eigen::MatrixXcd W = eig.eigenvectors() * eig.eigenvalues().cwiseSqrt().cwiseInverse().asDiagonal();
    std::vector<OneForm> out;
    for (int j = 0; j < m; ++j) {
        OneForm acc = scale_form(cand[0], W(0, j));
        for (int k = 1; k < m; ++k) acc = add_forms(M, acc, cand[k], 1.0, W(k, j));
        // deterministic phase: rotate the largest alpha entry to the positive axis
        Eigen::Index imax;
        acc.alpha.cwiseAbs().maxCoeff(&imax);
        Complex z = acc.alpha[imax];
        if (std::abs(z) > 0) acc = scale_form(acc, std::conj(z) / std::abs(z));
        out.push_back(acc);
    }
    return out;
}

} // namespace

HolomorphicBasis holomorphic_basis(const Mesh& M) {
    HolomorphicBasis B;
    B.harmonic = harmonic_basis(M);
    int g = M.genus;
    if (g == 0) {
        B.periods.resize(0, 0);
        return B;
    }
    double gap = 0;
    Eigen::MatrixXcd combos = min_beta_combinations(M, B.harmonic.forms, g, &gap);
    if (gap > 0.5)
        throw Error(Err::RankDeficient, "type split is ambiguous; refine the mesh");
    B.forms = orthonormal_forms(M, B.harmonic.forms, combos);
    int n = 2 * g;
    B.periods.resize(g, n);
    for (int j = 0; j < g; ++j)
        for (int m = 0; m < n; ++m)
            B.periods(j, m) = cochain_period(M, B.forms[j].values, B.harmonic.homology.cycles[m]);
    return B;
}

OneForm tau_pullback_form(const CoverMesh& C, const OneForm& f) {
    if (f.has_cochain) return make_oneform(C.mesh, tau_pullback(C, f.values));
    // charts are related by z -> -z + c, so covectors pull back negated
    Eigen::VectorXcd a(f.alpha.size()), b(f.beta.size());
    for (Eigen::Index ff = 0; ff < a.size(); ++ff) {
        a[ff] = -f.alpha[C.tau_face[ff]];
        b[ff] = -f.beta[C.tau_face[ff]];
    }
    return covector_form(C.mesh, a, b);
}

AntiInvariantBasis anti_invariant_basis(const CoverMesh& C) {
    check_equivariance(C);
    const Mesh& M = C.mesh;
    AntiInvariantBasis out;
    out.cover_genus = M.genus;
    {
        int bv = 0, be = 0, bf = 0;
        for (int v : C.base_vertex) bv = std::max(bv, v + 1);
        for (int e : C.base_edge) be = std::max(be, e + 1);
        for (int f : C.base_face) bf = std::max(bf, f + 1);
        out.base_genus = (2 - (bv - be + bf)) / 2;
    }
    int dim = out.cover_genus - out.base_genus; // complex dimension of each type piece
    if (dim == 0) return out;

    HarmonicBasis HB = harmonic_basis(M);
    std::vector<OneForm> anti;
    for (const OneForm& f : HB.forms) {
        OneForm t = tau_pullback_form(C, f);
        anti.push_back(add_forms(M, f, t, 0.5, -0.5));
    }
    // extract an orthonormal basis of the -1 eigenspace (rank 2*dim)
    int n = static_cast<int>(anti.size());
    Eigen::MatrixXcd G(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) G(i, j) = hodge_inner(M, anti[i], anti[j]);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(G);
    double lmax = eig.eigenvalues().maxCoeff();
    std::vector<int> keep;
    for (int i = 0; i < n; ++i)
        if (eig.eigenvalues()[i] > 1e-8 * lmax) keep.push_back(i);
    if (static_cast<int>(keep.size()) != 2 * dim)
        throw Error(Err::RankDeficient, "anti-invariant rank mismatch");
    Eigen::MatrixXcd combos(n, keep.size());
    for (size_t j = 0; j < keep.size(); ++j)
        combos.col(static_cast<Eigen::Index>(j)) =
            eig.eigenvectors().col(keep[j]) / std::sqrt(eig.eigenvalues()[keep[j]]);
    std::vector<OneForm> basis;
    for (size_t j = 0; j < keep.size(); ++j) {
        OneForm acc = scale_form(anti[0], combos(0, static_cast<Eigen::Index>(j)));
        for (int k = 1; k < n; ++k)
            acc = add_forms(M, acc, anti[k], 1.0, combos(k, static_cast<Eigen::Index>(j)));
        basis.push_back(acc);
    }

    double gap = 0;
    Eigen::MatrixXcd hol = min_beta_combinations(M, basis, dim, &gap);
    if (gap > 0.5) throw Error(Err::RankDeficient, "anti-invariant type split is ambiguous");
    out.h10_full = orthonormal_forms(M, basis, hol);
    for (const OneForm& f : out.h10_full) {
        out.h01_full.push_back(conjugate_form(M, f));
        out.h10.push_back(type_decompose(M, f).first);
        out.h01.push_back(type_decompose(M, out.h01_full.back()).second);
    }
    return out;
}

std::string basis_to_json(const Mesh& M, const HolomorphicBasis& B) {
    (void)M;
    nlohmann::json j;
    j["schema"] = 1;
    j["genus"] = M.genus;
    auto cplx = [](Complex z) { return nlohmann::json::array({z.real(), z.imag()}); };
    j["periods"] = nlohmann::json::array();
    for (Eigen::Index r = 0; r < B.periods.rows(); ++r) {
        nlohmann::json row = nlohmann::json::array();
        for (Eigen::Index c = 0; c < B.periods.cols(); ++c) row.push_back(cplx(B.periods(r, c)));
        j["periods"].push_back(row);
    }
    j["harmonic_gram"] = nlohmann::json::array();
    for (Eigen::Index r = 0; r < B.harmonic.gram.rows(); ++r) {
        nlohmann::json row = nlohmann::json::array();
        for (Eigen::Index c = 0; c < B.harmonic.gram.cols(); ++c) row.push_back(cplx(B.harmonic.gram(r, c)));
        j["harmonic_gram"].push_back(row);
    }
    return j.dump();
}

} // namespace strata
