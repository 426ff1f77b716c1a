#include "spr/verifier.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>
#include <vector>

#include <Eigen/Eigenvalues>
#include <Eigen/QR>

#include "spr/errors.hpp"
#include "spr/frame.hpp"

namespace spr {
namespace {

constexpr double kWitnessResidualTol = 1e-10;  // relative to ||F||
constexpr double kRankGapTol = 1e-6;           // sigma ratio declaring a rank drop

// Absolute eigenvalues sorted descending, with their eigenvector order.
struct Spectrum {
    Vector lambda;   // eigenvalues in |.|-descending order
    Matrix vectors;  // matching eigenvectors as columns
};

Spectrum ordered_spectrum(const Matrix& c) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(c);
    const int m = static_cast<int>(c.rows());
    std::vector<int> idx(m);
    std::iota(idx.begin(), idx.end(), 0);
    const Vector& ev = es.eigenvalues();
    std::stable_sort(idx.begin(), idx.end(),
                     [&](int a, int b) { return std::abs(ev[a]) > std::abs(ev[b]); });
    Spectrum s;
    s.lambda.resize(m);
    s.vectors.resize(m, m);
    for (int i = 0; i < m; ++i) {
        s.lambda[i] = ev[idx[i]];
        s.vectors.col(i) = es.eigenvectors().col(idx[i]);
    }
    return s;
}

// Accepts c (unit Frobenius norm) as a witness when F maps it to ~0 and its
// spectrum has a clean rank-1 or rank-2 gap.
std::optional<WitnessMatrix> classify_candidate(const Matrix& c, const LiftOperator& op,
                                                double f_norm, const char* strategy) {
    const int m = static_cast<int>(c.rows());
    const double denom = std::max(f_norm, 1e-300);
    const double residual = (op.rows * sym_lift(c)).norm() / denom;
    if (residual > kWitnessResidualTol) return std::nullopt;

    const Spectrum s = ordered_spectrum(c);
    const double s1 = std::abs(s.lambda[0]);
    const double s2 = m >= 2 ? std::abs(s.lambda[1]) : 0.0;
    const double s3 = m >= 3 ? std::abs(s.lambda[2]) : 0.0;
    if (s1 <= 0.0) return std::nullopt;

    WitnessMatrix w;
    if (s2 <= kRankGapTol * s1) {
        w.rank = 1;
        w.rank_gap = s2 > 0.0 ? s1 / s2 : std::numeric_limits<double>::infinity();
        w.u = s.vectors.col(0);
        w.v = Vector::Zero(m);
        w.lam1 = s.lambda[0];
        w.lam2 = 0.0;
    } else if (s3 <= kRankGapTol * s2) {
        w.rank = 2;
        w.rank_gap = s3 > 0.0 ? s2 / s3 : std::numeric_limits<double>::infinity();
        w.u = s.vectors.col(0);
        w.v = s.vectors.col(1);
        w.lam1 = s.lambda[0];
        w.lam2 = s.lambda[1];
    } else {
        return std::nullopt;
    }
    w.c = c;
    w.residual = residual;
    w.strategy = strategy;
    return w;
}

// Haar-ish random orthogonal matrix: QR of a Gaussian with the R diagonal
// signs folded into Q.
Matrix random_orthogonal(int dim, RngState& rng) {
    Matrix g(dim, dim);
    for (int i = 0; i < dim; ++i) g.row(i) = rng.gaussian_vector(dim).transpose();
    Eigen::HouseholderQR<Matrix> qr(g);
    Matrix q = qr.householderQ();
    const Matrix r = qr.matrixQR();
    for (int j = 0; j < dim; ++j) {
        if (r(j, j) < 0.0) q.col(j) = -q.col(j);
    }
    return q;
}

std::string join_indices(const std::vector<int>& idx) {
    std::ostringstream os;
    for (std::size_t i = 0; i < idx.size(); ++i) {
        if (i) os << ",";
        os << idx[i];
    }
    return os.str();
}

}  // namespace

Vector sym_lift(const Matrix& a) {
    if (a.rows() != a.cols()) throw DomainError("sym_lift: matrix must be square");
    const int m = static_cast<int>(a.rows());
    const Matrix s = 0.5 * (a + a.transpose());
    Vector v(sym_dim(m));
    for (int i = 0; i < m; ++i) v[i] = s(i, i);
    int idx = m;
    const double r2 = std::sqrt(2.0);
    for (int i = 0; i < m; ++i) {
        for (int j = i + 1; j < m; ++j) v[idx++] = r2 * s(i, j);
    }
    return v;
}

Matrix sym_unlift(const Vector& v, int ambient) {
    if (ambient < 1 || v.size() != sym_dim(ambient)) {
        throw DomainError("sym_unlift: coordinate length does not match the ambient dimension");
    }
    Matrix s(ambient, ambient);
    for (int i = 0; i < ambient; ++i) s(i, i) = v[i];
    int idx = ambient;
    const double inv_r2 = 1.0 / std::sqrt(2.0);
    for (int i = 0; i < ambient; ++i) {
        for (int j = i + 1; j < ambient; ++j) {
            const double e = v[idx++] * inv_r2;
            s(i, j) = e;
            s(j, i) = e;
        }
    }
    return s;
}

LiftOperator lift_operator(const SubspaceFamily& fam) {
    LiftOperator op;
    op.ambient = fam.ambient();
    op.rows.resize(fam.count(), sym_dim(op.ambient));
    for (int n = 0; n < fam.count(); ++n) {
        op.rows.row(n) = sym_lift(fam.at(n).projector()).transpose();
    }
    return op;
}

Certificate certify_structured(const Recipe& recipe) {
    (void)family_from_recipe(recipe);  // rejects malformed recipes

    Certificate cert;
    if (!recipe.design_a.invertible()) {
        cert.detail = "design A is singular";
        return cert;
    }
    if (!recipe.design_b.invertible()) {
        cert.detail = "design B is singular";
        return cert;
    }
    const ComplementReport rep = has_complement_property(recipe.base);
    cert.borderline = rep.borderline;
    if (!rep.holds) {
        cert.detail = "base frame fails the complement property at subset {" +
                      join_indices(*rep.failing_subset) + "}";
        return cert;
    }
    cert.certified = true;
    std::ostringstream os;
    os << "designs invertible (det A = " << recipe.design_a.det()
       << ", det B = " << recipe.design_b.det() << "); base frame has the complement property";
    cert.detail = os.str();
    return cert;
}

std::optional<WitnessMatrix> rank12_witness_search(const SubspaceFamily& fam, RngState& rng,
                                                   int restarts) {
    const LiftOperator op = lift_operator(fam);
    const double f_norm = operator_norm(op.rows);
    const Matrix null = null_space(op.rows);
    const int d = static_cast<int>(null.cols());
    if (d == 0) return std::nullopt;
    const int m = fam.ambient();

    // Null-space weights -> candidate matrix. Unit weights give unit
    // Frobenius norm because the lift is an isometry and the null basis is
    // orthonormal.
    auto candidate = [&](const Vector& w, const char* strategy) -> std::optional<WitnessMatrix> {
        Vector cv = null * w;
        const double nn = cv.norm();
        if (nn < 1e-14) return std::nullopt;
        return classify_candidate(sym_unlift(cv / nn, m), op, f_norm, strategy);
    };

    for (int j = 0; j < d; ++j) {
        if (auto w = candidate(Vector::Unit(d, j), "null-basis")) return w;
    }

    if (m == 3 && d >= 2) {
        // det(cos t A + sin t B) changes sign between t = 0 and t = pi in odd
        // dimension, so a singular pencil member exists; bisect for it.
        for (int i = 0; i < d; ++i) {
            for (int j = i + 1; j < d; ++j) {
                const Matrix a = sym_unlift(null.col(i), m);
                const Matrix b = sym_unlift(null.col(j), m);
                auto f = [&](double t) {
                    return Matrix(std::cos(t) * a + std::sin(t) * b).determinant();
                };
                const double f0 = a.determinant();
                double lo = 0.0, hi = M_PI;
                if (f0 == 0.0) {
                    hi = 0.0;
                } else {
                    double flo = f0;
                    while (hi - lo > 1e-14 * M_PI) {
                        const double mid = 0.5 * (lo + hi);
                        const double fm = f(mid);
                        if (fm == 0.0) {
                            lo = hi = mid;
                            break;
                        }
                        if ((fm > 0.0) == (flo > 0.0)) {
                            lo = mid;
                            flo = fm;
                        } else {
                            hi = mid;
                        }
                    }
                }
                double t = 0.5 * (lo + hi);
                for (int polish = 0; polish < 3; ++polish) {
                    const double h = 1e-7;
                    const double df = (f(t + h) - f(t - h)) / (2.0 * h);
                    if (df == 0.0) break;
                    const double step = f(t) / df;
                    if (!std::isfinite(step)) break;
                    t -= step;
                }
                Vector w = Vector::Zero(d);
                w[i] = std::cos(t);
                w[j] = std::sin(t);
                if (auto res = candidate(w, "pencil")) return res;
            }
        }
    }

    if (m >= 3 && restarts > 0) {
        // Descent on the third singular value over the null-space sphere.
        std::vector<Matrix> basis_mats;
        basis_mats.reserve(d);
        for (int i = 0; i < d; ++i) basis_mats.push_back(sym_unlift(null.col(i), m));

        auto sigma3 = [&](const Vector& w, Spectrum* out) {
            const Spectrum s = ordered_spectrum(sym_unlift(null * w, m));
            if (out) *out = s;
            return std::abs(s.lambda[2]);
        };

        for (int r = 0; r < restarts; ++r) {
            RngState sub = rng.fork(0x5173 + static_cast<std::uint64_t>(r));
            Vector w = sub.unit_vector(d);
            double cur = sigma3(w, nullptr);
            double step = 0.5;
            for (int it = 0; it < 300 && cur > 1e-13 && step > 1e-12; ++it) {
                Spectrum s;
                sigma3(w, &s);
                const Vector q = s.vectors.col(2);
                const double sgn = s.lambda[2] >= 0.0 ? 1.0 : -1.0;
                Vector grad(d);
                for (int i = 0; i < d; ++i) grad[i] = sgn * q.dot(basis_mats[i] * q);
                grad -= grad.dot(w) * w;
                const double gn = grad.norm();
                if (gn < 1e-15) break;
                bool moved = false;
                for (int bt = 0; bt < 25; ++bt) {
                    Vector next = w - (step / gn) * grad;
                    next.normalize();
                    const double val = sigma3(next, nullptr);
                    if (val < cur) {
                        w = next;
                        cur = val;
                        step *= 1.6;
                        moved = true;
                        break;
                    }
                    step *= 0.5;
                }
                if (!moved) break;
            }
            if (auto res = candidate(w, "descent")) return res;
        }
    }
    return std::nullopt;
}

std::pair<Vector, Vector> witness_to_pair(const WitnessMatrix& w) {
    if (w.rank == 1 || w.lam1 * w.lam2 > 0.0) {
        throw DomainError(
            "witness_to_pair: witness eigenvalues do not straddle zero; the leading "
            "eigenvector already has identically zero measurements (trivial refutation, "
            "no orthogonal pair exists)");
    }
    if (w.rank != 2) throw DomainError("witness_to_pair: witness rank must be 2");
    return {std::sqrt(std::abs(w.lam1)) * w.u, std::sqrt(std::abs(w.lam2)) * w.v};
}

namespace {

// Levenberg-Marquardt descent on sum_n (u'Q_n u - v'Q_n v)^2 with soft
// constraints ||u||^2 = 1 and u . v = 0; refines (u, v) in place. Shared by
// the witness search and the margin estimator.
void lm_pair_descent(const std::vector<Matrix>& projs, Vector& u, Vector& v, int iters) {
    const int n = static_cast<int>(projs.size());
    const int m = static_cast<int>(u.size());
    const int nres = n + 2;
    auto residuals = [&](const Vector& a, const Vector& b, Vector& r) {
        for (int i = 0; i < n; ++i) r[i] = a.dot(projs[i] * a) - b.dot(projs[i] * b);
        r[n] = a.squaredNorm() - 1.0;
        r[n + 1] = a.dot(b);
    };

    Vector r(nres);
    residuals(u, v, r);
    double cost = r.squaredNorm();
    double mu = 1e-3;
    for (int it = 0; it < iters && cost > 1e-22 && mu < 1e14; ++it) {
        Matrix jac(nres, 2 * m);
        for (int i = 0; i < n; ++i) {
            jac.row(i).head(m) = 2.0 * (projs[i] * u).transpose();
            jac.row(i).tail(m) = -2.0 * (projs[i] * v).transpose();
        }
        jac.row(n).head(m) = 2.0 * u.transpose();
        jac.row(n).tail(m).setZero();
        jac.row(n + 1).head(m) = v.transpose();
        jac.row(n + 1).tail(m) = u.transpose();

        const Matrix jtj = jac.transpose() * jac;
        const Vector jtr = jac.transpose() * r;
        const Vector delta = (jtj + mu * Matrix::Identity(2 * m, 2 * m)).ldlt().solve(-jtr);
        const Vector u2 = u + delta.head(m);
        const Vector v2 = v + delta.tail(m);
        Vector r2(nres);
        residuals(u2, v2, r2);
        const double c2 = r2.squaredNorm();
        if (c2 < cost) {
            u = u2;
            v = v2;
            r = r2;
            cost = c2;
            mu = std::max(mu * 0.3, 1e-12);
        } else {
            mu *= 3.0;
        }
    }
}

}  // namespace

std::optional<std::pair<Vector, Vector>> orthogonal_pair_search(const SubspaceFamily& fam,
                                                                RngState& rng, int restarts) {
    const int m = fam.ambient();
    const int n = fam.count();
    std::vector<Matrix> projs;
    projs.reserve(n);
    for (int i = 0; i < n; ++i) projs.push_back(fam.at(i).projector());

    for (int restart = 0; restart < restarts; ++restart) {
        RngState sub = rng.fork(0x0bb5 + static_cast<std::uint64_t>(restart));
        Vector u = sub.unit_vector(m);
        Vector v = random_unit_in_complement({u}, m, sub) * (0.3 + 0.7 * sub.next_double());
        lm_pair_descent(projs, u, v, 150);

        // Enforce the constraints exactly, then re-score the measurement gap.
        if (u.norm() < 1e-8) continue;
        u.normalize();
        v -= u.dot(v) * u;
        const double vn = v.norm();
        if (vn < 1e-6) continue;
        if (vn > 1.0) {
            const Vector old_u = u;
            u = v / vn;
            v = old_u / vn;
        }
        double obj = 0.0;
        for (int i = 0; i < n; ++i) {
            const double diff = u.dot(projs[i] * u) - v.dot(projs[i] * v);
            obj += diff * diff;
        }
        if (obj < 1e-16) return std::make_pair(u, v);
    }
    return std::nullopt;
}

Matrix adapted_basis(const Subspace& w, const Vector& x, const Vector& y, double tol) {
    const int m = w.ambient();
    if (x.size() != m || y.size() != m) {
        throw DomainError("adapted_basis: signal length does not match the ambient dimension");
    }
    const Matrix p = w.projector();
    const Vector px = p * x;
    const Vector py = p * y;
    const double nx = px.norm();
    const double ny = py.norm();
    if (std::abs(nx - ny) > tol * std::max({nx, ny, 1.0})) {
        throw DomainError("adapted_basis: projections of the two signals differ in norm");
    }
    const Matrix base = w.decoded_basis();
    const int dim = static_cast<int>(base.rows());
    const double scale = std::max(nx, ny);
    if (scale == 0.0) return base;

    std::vector<Vector> rows;
    auto push_direction = [&](Vector cand) {
        for (int pass = 0; pass < 2; ++pass) {
            for (const Vector& r : rows) cand -= r.dot(cand) * r;
        }
        const double nn = cand.norm();
        if (nn > 1e-9 * scale) rows.push_back(cand / nn);
    };
    push_direction(px + py);
    push_direction(px - py);
    while (static_cast<int>(rows.size()) < dim) {
        // Greedy completion from the stored basis: largest remaining residual.
        Vector best;
        double best_norm = -1.0;
        for (int i = 0; i < dim; ++i) {
            Vector cand = base.row(i).transpose();
            for (int pass = 0; pass < 2; ++pass) {
                for (const Vector& r : rows) cand -= r.dot(cand) * r;
            }
            if (cand.norm() > best_norm) {
                best_norm = cand.norm();
                best = cand;
            }
        }
        rows.push_back(best / best_norm);
    }
    Matrix out(dim, m);
    for (int i = 0; i < dim; ++i) out.row(i) = rows[i].transpose();
    return out;
}

double stability_margin(const SubspaceFamily& fam, RngState& rng, int samples) {
    const int m = fam.ambient();
    const int n = fam.count();
    std::vector<Matrix> projs;
    projs.reserve(n);
    for (int i = 0; i < n; ++i) projs.push_back(fam.at(i).projector());

    auto gap = [&](const Vector& x, const Vector& y) {
        double worst = 0.0;
        for (int i = 0; i < n; ++i) {
            worst = std::max(worst, std::abs((projs[i] * x).norm() - (projs[i] * y).norm()));
        }
        return worst;
    };

    double best = std::numeric_limits<double>::infinity();
    for (int s = 0; s < samples; ++s) {
        RngState sub = rng.fork(0xde17a + static_cast<std::uint64_t>(s));
        Vector x = sub.unit_vector(m);
        Vector y = random_unit_in_complement({x}, m, sub) * (0.05 + 0.95 * sub.next_double());
        double cur = gap(x, y);
        double step = 0.3;
        for (int it = 0; it < 200 && step > 1e-7; ++it) {
            Vector xp = x + step * sub.gaussian_vector(m);
            xp.normalize();
            Vector yp = y + step * sub.gaussian_vector(m);
            yp -= xp.dot(yp) * xp;
            const double ny = yp.norm();
            if (ny > 1.0) yp /= ny;
            if (ny < 0.05) {
                step *= 0.7;
                continue;
            }
            const double val = gap(xp, yp);
            if (val < cur) {
                x = xp;
                y = yp;
                cur = val;
                step *= 1.1;
            } else {
                step *= 0.8;
            }
        }
        best = std::min(best, cur);

        // Gauss-Newton polish: the stochastic phase lands near the valley of
        // equal measurements but creeps along it; the smooth least-squares
        // model finishes the local minimization.
        lm_pair_descent(projs, x, y, 80);
        if (x.norm() > 1e-8) {
            x.normalize();
            y -= x.dot(y) * x;
            const double ny = y.norm();
            if (ny > 1.0) {
                const Vector old_x = x;
                x = y / ny;
                y = old_x / ny;
            }
            if (y.norm() > 1e-8) best = std::min(best, gap(x, y));
        }
    }
    return best;
}

SubspaceFamily perturb_family(const SubspaceFamily& fam, double eps, RngState& rng) {
    if (!(eps > 0.0)) throw DomainError("perturb_family: eps must be positive");
    const int m = fam.ambient();
    std::vector<Subspace> out;
    out.reserve(fam.count());
    for (int n = 0; n < fam.count(); ++n) {
        RngState sub = rng.fork(0x9e12 + static_cast<std::uint64_t>(n));
        Matrix g(m, m);
        for (int i = 0; i < m; ++i) g.row(i) = sub.gaussian_vector(m).transpose();
        Matrix skew = 0.5 * (g - g.transpose());
        const double sn = operator_norm(skew);
        if (sn > 0.0) skew /= sn;

        const Subspace& s = fam.at(n);
        const Matrix p = s.projector();
        double t = 0.4 * std::min(eps, 1.0);
        for (int tries = 0; tries < 80; ++tries) {
            // Cayley rotation: orthogonal, smoothly reaching I as t -> 0.
            const Matrix rot = (Matrix::Identity(m, m) + t * skew) *
                               (Matrix::Identity(m, m) - t * skew).inverse();
            Subspace moved = s.complement_encoded()
                                 ? Subspace::complement(rot * s.stored().row(0).transpose())
                                 : Subspace::direct(s.stored() * rot.transpose());
            if (operator_norm(moved.projector() - p) < eps) {
                out.push_back(std::move(moved));
                break;
            }
            t *= 0.5;
        }
        if (static_cast<int>(out.size()) != n + 1) {
            out.push_back(s);  // eps so small that only the identity rotation fits
        }
    }
    return SubspaceFamily(m, std::move(out));
}

bool random_basis_complement_check(const SubspaceFamily& fam, RngState& rng, int trials) {
    const int m = fam.ambient();
    int total = 0;
    for (int n = 0; n < fam.count(); ++n) total += fam.at(n).dim();
    if (total > kComplementEnumCap) {
        throw ResourceError("random_basis_complement_check: pooled vector count exceeds the "
                            "complement enumeration cap");
    }
    for (int trial = 0; trial < trials; ++trial) {
        RngState sub = rng.fork(0xba515 + static_cast<std::uint64_t>(trial));
        Matrix pool(total, m);
        int at = 0;
        for (int n = 0; n < fam.count(); ++n) {
            const Matrix base = fam.at(n).decoded_basis();
            const int dim = static_cast<int>(base.rows());
            pool.middleRows(at, dim) = random_orthogonal(dim, sub) * base;
            at += dim;
        }
        if (!has_complement_property(Frame(std::move(pool))).holds) return false;
    }
    return true;
}

}  // namespace spr
