#include "spr/builder.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <Eigen/SVD>

#include "spr/errors.hpp"

namespace spr {
namespace {

constexpr int kBuilderAttempts = 32;

void validate_dims(int ambient, const std::vector<int>& dims, std::size_t expected,
                   const char* who) {
    if (ambient < 2) throw DomainError(std::string(who) + ": ambient must be at least 2");
    if (dims.size() != expected) {
        throw DomainError(std::string(who) + ": expected " + std::to_string(expected) +
                          " dimensions, got " + std::to_string(dims.size()));
    }
    for (int d : dims) {
        if (d < 1 || d > ambient - 1) {
            throw DomainError(std::string(who) + ": dimensions must lie in [1, ambient-1]");
        }
    }
}

// Design for a trailing block: subspaces of dimension M-1 are realized as
// orthocomplements of a single vector, so their design row sum is 1 and all
// row sums stay within the invertible-construction range [1, M-2].
ZeroOneDesign trailing_design(int ambient, const std::vector<int>& block_dims,
                              std::vector<bool>& flags_out) {
    std::vector<int> sums;
    sums.reserve(block_dims.size());
    flags_out.clear();
    for (int d : block_dims) {
        const bool flag = (d == ambient - 1);
        flags_out.push_back(flag);
        sums.push_back(flag ? 1 : d);
    }
    if (sums.size() == 1) {
        IntMatrix one(1, 1);
        one(0, 0) = 1;
        return ZeroOneDesign::from_matrix(std::move(one));
    }
    return zero_one_invertible(sums);
}

std::vector<ComplexVector> complex_orthonormal_rows(int m, RngState& rng) {
    std::vector<ComplexVector> rows;
    rows.reserve(m);
    while (static_cast<int>(rows.size()) < m) {
        ComplexVector v(m);
        for (int i = 0; i < m; ++i) {
            v[i] = std::complex<double>(rng.next_gaussian(), rng.next_gaussian());
        }
        const double orig = v.norm();
        for (int pass = 0; pass < 2; ++pass) {
            for (const ComplexVector& u : rows) v -= u.dot(v) * u;
        }
        const double rem = v.norm();
        if (rem > 1e-6 * orig) rows.push_back(v / rem);
    }
    return rows;
}

// svec coordinates of v v^T (off-diagonal entries scaled by sqrt 2 so the
// embedding is an isometry); used for the tight-weight solve.
Vector svec_outer(const Vector& v) {
    const int m = static_cast<int>(v.size());
    Vector out(m * (m + 1) / 2);
    int idx = 0;
    for (int i = 0; i < m; ++i) out[idx++] = v[i] * v[i];
    const double r2 = std::sqrt(2.0);
    for (int i = 0; i < m; ++i) {
        for (int j = i + 1; j < m; ++j) out[idx++] = r2 * v[i] * v[j];
    }
    return out;
}

Vector row_of(const Matrix& m, int i) { return m.row(i).transpose(); }

HyperplaneFamily hyperplanes_from_rows(const Matrix& rows, const char* who) {
    const int n = static_cast<int>(rows.rows());
    const int m = static_cast<int>(rows.cols());
    Matrix normals(n, m);
    Vector weights(n);
    for (int i = 0; i < n; ++i) {
        const double nn = rows.row(i).norm();
        if (nn < 1e-8) throw DomainError(std::string(who) + ": zero frame vector");
        normals.row(i) = rows.row(i) / nn;
        weights[i] = nn * nn;
    }
    for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) {
            if (std::abs(normals.row(i).dot(normals.row(j))) < 1e-8) {
                throw DomainError(std::string(who) + ": two frame vectors are orthogonal");
            }
        }
    }
    const Matrix gram = rows.transpose() * rows;
    if (operator_norm(gram - Matrix::Identity(m, m)) > 1e-10) {
        throw DomainError(std::string(who) + ": rows are not a Parseval frame");
    }
    std::vector<Subspace> subs;
    subs.reserve(n);
    for (int i = 0; i < n; ++i) subs.emplace_back(Subspace::complement(row_of(normals, i)));
    return HyperplaneFamily{SubspaceFamily(m, std::move(subs)), std::move(normals),
                            std::move(weights)};
}

}  // namespace

SubspaceFamily family_from_recipe(const Recipe& recipe) {
    const int m = recipe.ambient();
    if (m < 2) throw DomainError("family_from_recipe: ambient must be at least 2");
    if (recipe.base.count() != 2 * m - 1) {
        throw DomainError("family_from_recipe: base frame must hold 2M-1 vectors");
    }
    if (recipe.design_a.size() != m || recipe.design_b.size() != m - 1) {
        throw DomainError("family_from_recipe: design sizes must be M and M-1");
    }
    if (recipe.complement_rows.size() != static_cast<std::size_t>(m - 1) ||
        recipe.dims.size() != static_cast<std::size_t>(2 * m - 1)) {
        throw DomainError("family_from_recipe: metadata sizes do not match the designs");
    }
    for (int d : recipe.dims) {
        if (d < 1 || d > m - 1) {
            throw DomainError("family_from_recipe: dimensions must lie in [1, M-1]");
        }
    }
    const Matrix& rows = recipe.base.vectors();
    const Matrix lead = rows.topRows(m);
    if ((lead * lead.transpose() - Matrix::Identity(m, m)).cwiseAbs().maxCoeff() > 1e-8) {
        throw DomainError("family_from_recipe: leading base block is not an orthonormal basis");
    }
    const Matrix tail = rows.bottomRows(m - 1);
    if ((tail * tail.transpose() - Matrix::Identity(m - 1, m - 1)).cwiseAbs().maxCoeff() > 1e-8) {
        throw DomainError("family_from_recipe: trailing base block is not orthonormal");
    }

    std::vector<Subspace> subs;
    subs.reserve(2 * m - 1);
    for (int k = 0; k < m; ++k) {
        const std::vector<int> support = recipe.design_a.row_support(k);
        if (static_cast<int>(support.size()) != recipe.dims[k]) {
            throw DomainError("family_from_recipe: design A row sum differs from dims");
        }
        Matrix basis(support.size(), m);
        for (std::size_t i = 0; i < support.size(); ++i) basis.row(i) = rows.row(support[i]);
        subs.push_back(Subspace::direct(std::move(basis)));
    }
    for (int k = 0; k < m - 1; ++k) {
        const std::vector<int> support = recipe.design_b.row_support(k);
        const int want = recipe.dims[m + k];
        if (recipe.complement_rows[k]) {
            if (want != m - 1 || support.size() != 1) {
                throw DomainError(
                    "family_from_recipe: complement-encoded row must have a single one and "
                    "dimension M-1");
            }
            subs.push_back(Subspace::complement(row_of(rows, m + support[0])));
        } else {
            if (static_cast<int>(support.size()) != want) {
                throw DomainError("family_from_recipe: design B row sum differs from dims");
            }
            Matrix basis(support.size(), m);
            for (std::size_t i = 0; i < support.size(); ++i) {
                basis.row(i) = rows.row(m + support[i]);
            }
            subs.push_back(Subspace::direct(std::move(basis)));
        }
    }
    return SubspaceFamily(m, std::move(subs));
}

BuiltFamily build_real_family(int ambient, const std::vector<int>& dims, RngState& rng) {
    validate_dims(ambient, dims, static_cast<std::size_t>(2 * ambient - 1), "build_real_family");
    const int m = ambient;

    const Frame stack = stacked_orthobases(m, 2, rng);
    Matrix rows = stack.vectors().topRows(2 * m - 1);
    Frame base(std::move(rows), {{0, m}, {m, m - 1}});

    ZeroOneDesign design_a =
        zero_one_invertible(std::vector<int>(dims.begin(), dims.begin() + m));
    std::vector<bool> flags;
    ZeroOneDesign design_b =
        trailing_design(m, std::vector<int>(dims.begin() + m, dims.end()), flags);

    Recipe recipe{std::move(base), std::move(design_a), std::move(design_b), std::move(flags),
                  dims};
    SubspaceFamily family = family_from_recipe(recipe);
    return BuiltFamily{std::move(family), std::move(recipe)};
}

ComplexSubspaceFamily build_complex_family(int ambient, const std::vector<int>& dims,
                                           RngState& rng) {
    validate_dims(ambient, dims, static_cast<std::size_t>(4 * ambient - 3),
                  "build_complex_family");
    const int m = ambient;

    std::vector<ComplexVector> base;
    base.reserve(4 * m - 3);
    for (int g = 0; g < 4; ++g) {
        const std::vector<ComplexVector> rows = complex_orthonormal_rows(m, rng);
        const int take = (g == 0) ? m : m - 1;
        for (int i = 0; i < take; ++i) base.push_back(rows[i]);
    }

    std::vector<ComplexSubspace> subs;
    subs.reserve(4 * m - 3);
    const ZeroOneDesign design_a =
        zero_one_invertible(std::vector<int>(dims.begin(), dims.begin() + m));
    for (int k = 0; k < m; ++k) {
        const std::vector<int> support = design_a.row_support(k);
        ComplexMatrix basis(support.size(), m);
        for (std::size_t i = 0; i < support.size(); ++i) basis.row(i) = base[support[i]].transpose();
        subs.push_back(ComplexSubspace::direct(std::move(basis)));
    }
    for (int g = 0; g < 3; ++g) {
        const int offset = m + g * (m - 1);
        std::vector<bool> flags;
        const ZeroOneDesign design = trailing_design(
            m, std::vector<int>(dims.begin() + offset, dims.begin() + offset + (m - 1)), flags);
        for (int k = 0; k < m - 1; ++k) {
            const std::vector<int> support = design.row_support(k);
            if (flags[k]) {
                subs.push_back(ComplexSubspace::complement(base[offset + support[0]]));
            } else {
                ComplexMatrix basis(support.size(), m);
                for (std::size_t i = 0; i < support.size(); ++i) {
                    basis.row(i) = base[offset + support[i]].transpose();
                }
                subs.push_back(ComplexSubspace::direct(std::move(basis)));
            }
        }
    }
    return ComplexSubspaceFamily(m, std::move(subs));
}

HyperplaneFamily build_hyperplane_family(int ambient, int count, RngState& rng) {
    if (ambient < 2) throw DomainError("build_hyperplane_family: ambient must be at least 2");
    if (count <= ambient) {
        // count == ambient would force an orthonormal basis, contradicting the
        // pairwise non-orthogonality requirement.
        throw DomainError("build_hyperplane_family: need more hyperplanes than dimensions");
    }
    for (int attempt = 0; attempt < kBuilderAttempts; ++attempt) {
        // Orthonormal columns of a Gaussian matrix: the rows then form a
        // Parseval frame, almost surely full spark with no orthogonal pair.
        std::vector<Vector> cols;
        cols.reserve(ambient);
        bool degenerate = false;
        for (int j = 0; j < ambient && !degenerate; ++j) {
            Vector c = rng.gaussian_vector(count);
            for (int pass = 0; pass < 2; ++pass) {
                for (const Vector& u : cols) c -= u.dot(c) * u;
            }
            const double nn = c.norm();
            if (nn < 1e-8) {
                degenerate = true;
            } else {
                cols.push_back(c / nn);
            }
        }
        if (degenerate) continue;
        Matrix q(count, ambient);
        for (int j = 0; j < ambient; ++j) q.col(j) = cols[j];

        try {
            HyperplaneFamily hf = hyperplanes_from_rows(q, "build_hyperplane_family");
            bool spark_ok = true;
            if (binomial_capped(count, ambient, kSparkSubsetCap) <= kSparkSubsetCap) {
                spark_ok = is_full_spark(Frame(q));
            }
            if (spark_ok) return hf;
        } catch (const DomainError&) {
            // Degenerate draw (orthogonal pair or zero row); redraw.
        }
    }
    throw DependencyError("build_hyperplane_family: failed to draw an admissible frame");
}

Frame r3_parseval_example() {
    const double r = std::sqrt(0.4);
    const double h = std::sqrt(0.2);
    Matrix rows(5, 3);
    for (int k = 0; k < 5; ++k) {
        const double t = 2.0 * M_PI * k / 5.0;
        rows(k, 0) = r * std::cos(t);
        rows(k, 1) = r * std::sin(t);
        rows(k, 2) = h;
    }
    return Frame(std::move(rows));
}

HyperplaneFamily hyperplanes_from_frame(const Frame& f) {
    if (binomial_capped(f.count(), f.ambient(), kSparkSubsetCap) <= kSparkSubsetCap &&
        !is_full_spark(f)) {
        throw DomainError("hyperplanes_from_frame: frame is not full spark");
    }
    return hyperplanes_from_rows(f.vectors(), "hyperplanes_from_frame");
}

HyperplaneFamily hyperplane_family_from(const SubspaceFamily& fam) {
    const int m = fam.ambient();
    const int n = fam.count();
    if (m < 2) throw DomainError("hyperplane_family_from: ambient must be at least 2");
    Matrix normals(n, m);
    for (int i = 0; i < n; ++i) {
        const Subspace& s = fam.at(i);
        if (s.dim() != m - 1) {
            throw DomainError("hyperplane_family_from: subspace " + std::to_string(i) +
                              " is not a hyperplane");
        }
        if (s.complement_encoded()) {
            normals.row(i) = s.stored().row(0);
        } else {
            const Matrix ns = null_space(s.stored());
            normals.row(i) = ns.col(0).transpose();
        }
    }

    // Tight weights solve sum_n a_n normal_n normal_n^T = I in the symmetric
    // embedding; an inconsistent system means the family is not a weighted
    // tight fusion of hyperplane normals.
    Matrix system(m * (m + 1) / 2, n);
    for (int i = 0; i < n; ++i) system.col(i) = svec_outer(row_of(normals, i));
    Vector rhs = Vector::Zero(m * (m + 1) / 2);
    rhs.head(m).setOnes();
    Eigen::JacobiSVD<Matrix> svd(system, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const Vector weights = svd.solve(rhs);
    if ((system * weights - rhs).norm() > 1e-8) {
        throw DomainError("hyperplane_family_from: normals admit no tight weights");
    }
    if (std::abs(weights.sum() - 1.0) <= 1e-6) {
        throw DomainError("hyperplane_family_from: tight weights sum to 1");
    }

    std::vector<Subspace> subs;
    subs.reserve(n);
    for (int i = 0; i < n; ++i) subs.emplace_back(Subspace::complement(row_of(normals, i)));
    return HyperplaneFamily{SubspaceFamily(m, std::move(subs)), std::move(normals), weights};
}

R3Counterexample r3_counterexample_family() {
    RngState rng(0x5EED0C0DEull);
    const Frame stack = stacked_orthobases(3, 2, rng);
    const Matrix& v = stack.vectors();  // rows: phi0..phi2, psi0..psi2

    Matrix base_rows(5, 3);
    base_rows << v.row(0), v.row(1), v.row(2), v.row(3), v.row(4);
    Frame base(std::move(base_rows), {{0, 3}, {3, 2}});

    IntMatrix a(3, 3);
    a << 1, 0, 1,
         0, 1, 1,
         0, 0, 1;
    Recipe recipe{std::move(base), ZeroOneDesign::from_matrix(std::move(a)),
                  ZeroOneDesign::from_matrix(IntMatrix::Identity(2, 2)),
                  {false, false},
                  {2, 2, 1, 1, 1}};
    SubspaceFamily family = family_from_recipe(recipe);

    auto plane = [&](int i, int j) {
        Matrix b(2, 3);
        b.row(0) = v.row(i);
        b.row(1) = v.row(j);
        return Subspace::direct(std::move(b));
    };
    auto line = [&](int i) {
        Matrix b(1, 3);
        b.row(0) = v.row(i);
        return Subspace::direct(std::move(b));
    };
    std::vector<Subspace> comp;
    comp.push_back(line(1));      // span{phi0, phi2} has complement span{phi1}
    comp.push_back(line(0));      // span{phi1, phi2} -> span{phi0}
    comp.push_back(plane(0, 1));  // span{phi2}       -> span{phi0, phi1}
    comp.push_back(plane(4, 5));  // span{psi0}       -> span{psi1, psi2}
    comp.push_back(plane(3, 5));  // span{psi1}       -> span{psi0, psi2}

    return R3Counterexample{std::move(family), SubspaceFamily(3, std::move(comp)),
                            std::move(recipe)};
}

SubspaceFamily extend_to_hyperplanes(const SubspaceFamily& fam, const Vector& x, const Vector& y,
                                     double tol) {
    const int m = fam.ambient();
    if (x.size() != m || y.size() != m) {
        throw DomainError("extend_to_hyperplanes: signal length mismatch");
    }
    const double scale = std::max(x.norm(), y.norm());
    if (scale == 0.0) throw DomainError("extend_to_hyperplanes: both signals are zero");
    if (std::min((x - y).norm(), (x + y).norm()) <= tol * scale) {
        throw DomainError("extend_to_hyperplanes: signals agree up to sign");
    }
    const MeasurementVector mx = measure(fam, x);
    const MeasurementVector my = measure(fam, y);
    if ((mx - my).cwiseAbs().maxCoeff() > tol * scale * scale) {
        throw DomainError("extend_to_hyperplanes: signals are not a witness pair");
    }

    auto equalizing_angle = [&](const Eigen::Vector2d& a, const Eigen::Vector2d& b) {
        const double zero = 1e-13 * scale;
        auto g = [&](double t) {
            const double c = std::cos(t), s = std::sin(t);
            return std::abs(a[0] * c + a[1] * s) - std::abs(b[0] * c + b[1] * s);
        };
        if (a.norm() <= zero && b.norm() <= zero) return 0.0;
        if (a.norm() <= zero) return std::atan2(-b[0], b[1]);  // kill the b component too
        if (b.norm() <= zero) return std::atan2(-a[0], a[1]);
        double lo = std::atan2(-a[0], a[1]);  // g(lo) = -|b.e| <= 0
        double hi = std::atan2(-b[0], b[1]);  // g(hi) = |a.e| >= 0
        // Both directions are defined up to pi; bracket over the short arc.
        if (hi - lo > M_PI / 2.0) hi -= M_PI;
        if (lo - hi > M_PI / 2.0) hi += M_PI;
        for (int it = 0; it < 80; ++it) {
            const double mid = 0.5 * (lo + hi);
            if (g(mid) <= 0.0) {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        // lo keeps g <= 0 and hi keeps g >= 0; their midpoint is the root to
        // working precision.
        return 0.5 * (lo + hi);
    };

    std::vector<Subspace> out;
    out.reserve(fam.count());
    for (int n = 0; n < fam.count(); ++n) {
        const Subspace& s = fam.at(n);
        if (s.dim() == m - 1) {
            out.push_back(s);
            continue;
        }
        Matrix rows = s.decoded_basis();
        while (rows.rows() < m - 1) {
            const Matrix comp = null_space(rows);  // columns, >= 2 of them here
            const Vector p1 = comp.col(0);
            const Vector p2 = comp.col(1);
            const Eigen::Vector2d a(p1.dot(x), p2.dot(x));
            const Eigen::Vector2d b(p1.dot(y), p2.dot(y));
            const double t = equalizing_angle(a, b);
            const Vector z = std::cos(t) * p1 + std::sin(t) * p2;
            rows.conservativeResize(rows.rows() + 1, Eigen::NoChange);
            rows.row(rows.rows() - 1) = z.transpose();
        }
        out.push_back(Subspace::direct(std::move(rows)));
    }
    return SubspaceFamily(m, std::move(out));
}

}  // namespace spr
