#include "spr/io.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

#include "spr/errors.hpp"

namespace spr {
namespace {

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

class LineReader {
public:
    explicit LineReader(std::istream& in) : in_(in) {}

    bool next(std::vector<std::string>& tokens) {
        std::string line;
        while (std::getline(in_, line)) {
            ++lineno_;
            const auto hash = line.find('#');
            if (hash != std::string::npos) line.erase(hash);
            tokens.clear();
            std::istringstream ls(line);
            std::string tok;
            while (ls >> tok) tokens.push_back(tok);
            if (!tokens.empty()) return true;
        }
        return false;
    }

    std::vector<std::string> require(const std::string& what) {
        std::vector<std::string> tokens;
        if (!next(tokens)) fail("unexpected end of file, expected " + what);
        return tokens;
    }

    [[noreturn]] void fail(const std::string& msg) const {
        throw DomainError("parse error at line " + std::to_string(lineno_) + ": " + msg);
    }

    double to_double(const std::string& tok) const {
        char* end = nullptr;
        const double v = std::strtod(tok.c_str(), &end);
        if (end == tok.c_str() || *end != '\0') fail("expected a number, got '" + tok + "'");
        return v;
    }

    long long to_int(const std::string& tok) const {
        char* end = nullptr;
        const long long v = std::strtoll(tok.c_str(), &end, 10);
        if (end == tok.c_str() || *end != '\0') fail("expected an integer, got '" + tok + "'");
        return v;
    }

    // Line of the form "<keyword> <integer>".
    int keyword_int(const std::string& keyword, long long lo, long long hi) {
        const auto t = require("'" + keyword + " <n>'");
        if (t.size() != 2 || t[0] != keyword) fail("expected '" + keyword + " <n>'");
        const long long v = to_int(t[1]);
        if (v < lo || v > hi) fail("'" + keyword + "' out of range");
        return static_cast<int>(v);
    }

    Vector row(int k, const std::string& what) {
        const auto t = require(what);
        if (static_cast<int>(t.size()) != k) {
            fail("expected " + std::to_string(k) + " numbers for " + what);
        }
        Vector v(k);
        for (int i = 0; i < k; ++i) v[i] = to_double(t[i]);
        return v;
    }

    void expect_header(const char* magic) {
        const auto t = require(std::string("header '") + magic + " 1'");
        if (t.size() != 2 || t[0] != magic || t[1] != "1") {
            fail(std::string("expected header '") + magic + " 1'");
        }
    }

private:
    std::istream& in_;
    int lineno_ = 0;
};

void write_real_row(std::ostream& out, const Eigen::Ref<const Eigen::RowVectorXd>& row) {
    for (int j = 0; j < row.size(); ++j) {
        if (j) out << ' ';
        out << fmt(row[j]);
    }
    out << '\n';
}

void write_complex_row(std::ostream& out, const ComplexMatrix& m, int i) {
    for (int j = 0; j < m.cols(); ++j) {
        if (j) out << ' ';
        out << fmt(m(i, j).real()) << ' ' << fmt(m(i, j).imag());
    }
    out << '\n';
}

ComplexVector parse_complex_row(LineReader& r, int m, const std::string& what) {
    const Vector flat = r.row(2 * m, what);
    ComplexVector v(m);
    for (int j = 0; j < m; ++j) v[j] = std::complex<double>(flat[2 * j], flat[2 * j + 1]);
    return v;
}

std::string field_line(LineReader& r) {
    const auto t = r.require("'field real|complex'");
    if (t.size() != 2 || t[0] != "field" || (t[1] != "real" && t[1] != "complex")) {
        r.fail("expected 'field real' or 'field complex'");
    }
    return t[1];
}

struct SubspaceHeader {
    int dim = 0;
    bool complement = false;
};

SubspaceHeader subspace_header(LineReader& r, int k, int ambient) {
    const auto t = r.require("subspace header");
    if (t.size() != 6 || t[0] != "subspace" || t[2] != "dim" || t[4] != "complement") {
        r.fail("expected 'subspace <k> dim <d> complement <0|1>'");
    }
    if (r.to_int(t[1]) != k) r.fail("subspace indices must be consecutive from 0");
    SubspaceHeader h;
    const long long d = r.to_int(t[3]);
    if (d < 1 || d >= ambient) r.fail("subspace dimension out of range");
    h.dim = static_cast<int>(d);
    const long long c = r.to_int(t[5]);
    if (c != 0 && c != 1) r.fail("complement flag must be 0 or 1");
    h.complement = c == 1;
    if (h.complement && h.dim != ambient - 1) {
        r.fail("complement-encoded subspaces must have dimension ambient-1");
    }
    return h;
}

IntMatrix read_design_rows(LineReader& r, int n, const std::string& what) {
    IntMatrix m(n, n);
    for (int i = 0; i < n; ++i) {
        const auto t = r.require(what + " row");
        if (static_cast<int>(t.size()) != n) {
            r.fail("expected " + std::to_string(n) + " entries per " + what + " row");
        }
        for (int j = 0; j < n; ++j) {
            const long long v = r.to_int(t[j]);
            if (v != 0 && v != 1) r.fail(what + " entries must be 0 or 1");
            m(i, j) = static_cast<int>(v);
        }
    }
    return m;
}

template <typename T>
T open_and_read(const std::string& path, T (*reader)(std::istream&)) {
    std::ifstream in(path);
    if (!in) throw ResourceError("cannot open " + path + " for reading");
    return reader(in);
}

template <typename T>
void open_and_write(const std::string& path, const T& value,
                    void (*writer)(std::ostream&, const T&)) {
    std::ofstream out(path);
    if (!out) throw ResourceError("cannot open " + path + " for writing");
    writer(out, value);
    out.flush();
    if (!out) throw ResourceError("failed writing " + path);
}

}  // namespace

void write_family(std::ostream& out, const AnyFamily& fam) {
    out << "SFF 1\n";
    if (std::holds_alternative<SubspaceFamily>(fam)) {
        const SubspaceFamily& f = std::get<SubspaceFamily>(fam);
        out << "field real\n";
        out << "ambient " << f.ambient() << '\n';
        out << "count " << f.count() << '\n';
        for (int k = 0; k < f.count(); ++k) {
            const Subspace& s = f.at(k);
            out << "subspace " << k << " dim " << s.dim() << " complement "
                << (s.complement_encoded() ? 1 : 0) << '\n';
            for (int i = 0; i < s.stored().rows(); ++i) write_real_row(out, s.stored().row(i));
        }
    } else {
        const ComplexSubspaceFamily& f = std::get<ComplexSubspaceFamily>(fam);
        out << "field complex\n";
        out << "ambient " << f.ambient() << '\n';
        out << "count " << f.count() << '\n';
        for (int k = 0; k < f.count(); ++k) {
            const ComplexSubspace& s = f.at(k);
            out << "subspace " << k << " dim " << s.dim() << " complement "
                << (s.complement_encoded() ? 1 : 0) << '\n';
            for (int i = 0; i < s.stored().rows(); ++i) write_complex_row(out, s.stored(), i);
        }
    }
}

AnyFamily read_family(std::istream& in) {
    LineReader r(in);
    r.expect_header("SFF");
    const std::string field = field_line(r);
    const int ambient = r.keyword_int("ambient", 2, 4096);
    const int count = r.keyword_int("count", 1, 1 << 20);
    if (field == "real") {
        std::vector<Subspace> subs;
        subs.reserve(count);
        for (int k = 0; k < count; ++k) {
            const SubspaceHeader h = subspace_header(r, k, ambient);
            if (h.complement) {
                subs.push_back(Subspace::complement(r.row(ambient, "unit normal")));
            } else {
                Matrix basis(h.dim, ambient);
                for (int i = 0; i < h.dim; ++i) {
                    basis.row(i) = r.row(ambient, "basis row").transpose();
                }
                subs.push_back(Subspace::direct(std::move(basis)));
            }
        }
        return SubspaceFamily(ambient, std::move(subs));
    }
    std::vector<ComplexSubspace> subs;
    subs.reserve(count);
    for (int k = 0; k < count; ++k) {
        const SubspaceHeader h = subspace_header(r, k, ambient);
        if (h.complement) {
            subs.push_back(ComplexSubspace::complement(parse_complex_row(r, ambient, "normal")));
        } else {
            ComplexMatrix basis(h.dim, ambient);
            for (int i = 0; i < h.dim; ++i) {
                basis.row(i) = parse_complex_row(r, ambient, "basis row").transpose();
            }
            subs.push_back(ComplexSubspace::direct(std::move(basis)));
        }
    }
    return ComplexSubspaceFamily(ambient, std::move(subs));
}

void write_recipe(std::ostream& out, const Recipe& recipe) {
    const int m = recipe.ambient();
    out << "SRF 1\n";
    out << "ambient " << m << '\n';
    out << "dims";
    for (int d : recipe.dims) out << ' ' << d;
    out << '\n';
    out << "base " << recipe.base.count() << '\n';
    for (int i = 0; i < recipe.base.count(); ++i) {
        write_real_row(out, recipe.base.vectors().row(i));
    }
    out << "design_a " << recipe.design_a.size() << '\n';
    for (int i = 0; i < recipe.design_a.size(); ++i) {
        for (int j = 0; j < recipe.design_a.size(); ++j) {
            if (j) out << ' ';
            out << recipe.design_a.matrix()(i, j);
        }
        out << '\n';
    }
    out << "design_b " << recipe.design_b.size() << '\n';
    for (int i = 0; i < recipe.design_b.size(); ++i) {
        for (int j = 0; j < recipe.design_b.size(); ++j) {
            if (j) out << ' ';
            out << recipe.design_b.matrix()(i, j);
        }
        out << '\n';
    }
    out << "complement_flags";
    for (bool f : recipe.complement_rows) out << ' ' << (f ? 1 : 0);
    out << '\n';
}

Recipe read_recipe(std::istream& in) {
    LineReader r(in);
    r.expect_header("SRF");
    const int m = r.keyword_int("ambient", 2, 4096);

    const auto dims_tokens = r.require("'dims ...'");
    if (dims_tokens.empty() || dims_tokens[0] != "dims" ||
        static_cast<int>(dims_tokens.size()) != 2 * m) {
        r.fail("expected 'dims' followed by 2M-1 values");
    }
    std::vector<int> dims;
    dims.reserve(2 * m - 1);
    for (int i = 1; i < 2 * m; ++i) {
        const long long d = r.to_int(dims_tokens[i]);
        if (d < 1 || d >= m) r.fail("dimension out of range [1, M-1]");
        dims.push_back(static_cast<int>(d));
    }

    const int base_count = r.keyword_int("base", 2 * m - 1, 2 * m - 1);
    Matrix rows(base_count, m);
    for (int i = 0; i < base_count; ++i) rows.row(i) = r.row(m, "base row").transpose();
    Frame base(std::move(rows), {{0, m}, {m, m - 1}});

    const int na = r.keyword_int("design_a", m, m);
    ZeroOneDesign design_a = ZeroOneDesign::from_matrix(read_design_rows(r, na, "design_a"));
    const int nb = r.keyword_int("design_b", m - 1, m - 1);
    ZeroOneDesign design_b = ZeroOneDesign::from_matrix(read_design_rows(r, nb, "design_b"));

    const auto flag_tokens = r.require("'complement_flags ...'");
    if (flag_tokens.empty() || flag_tokens[0] != "complement_flags" ||
        static_cast<int>(flag_tokens.size()) != m) {
        r.fail("expected 'complement_flags' followed by M-1 values");
    }
    std::vector<bool> flags;
    flags.reserve(m - 1);
    for (int i = 1; i < m; ++i) {
        const long long f = r.to_int(flag_tokens[i]);
        if (f != 0 && f != 1) r.fail("complement flags must be 0 or 1");
        flags.push_back(f == 1);
    }

    Recipe recipe{std::move(base), std::move(design_a), std::move(design_b), std::move(flags),
                  std::move(dims)};
    (void)family_from_recipe(recipe);  // cross-validates the parts
    return recipe;
}

void write_measurement(std::ostream& out, const MeasurementVector& meas) {
    out << "SMF 1\n";
    out << "count " << meas.size() << '\n';
    for (int i = 0; i < meas.size(); ++i) out << fmt(meas[i]) << '\n';
}

MeasurementVector read_measurement(std::istream& in) {
    LineReader r(in);
    r.expect_header("SMF");
    const int count = r.keyword_int("count", 1, 1 << 20);
    MeasurementVector meas(count);
    for (int i = 0; i < count; ++i) meas[i] = r.row(1, "measurement value")[0];
    return meas;
}

void write_signal(std::ostream& out, const AnySignal& signal) {
    out << "SVF 1\n";
    if (std::holds_alternative<Vector>(signal)) {
        const Vector& x = std::get<Vector>(signal);
        out << "field real\n";
        out << "ambient " << x.size() << '\n';
        write_real_row(out, x.transpose());
    } else {
        const ComplexVector& x = std::get<ComplexVector>(signal);
        out << "field complex\n";
        out << "ambient " << x.size() << '\n';
        ComplexMatrix row(1, x.size());
        row.row(0) = x.transpose();
        write_complex_row(out, row, 0);
    }
}

AnySignal read_signal(std::istream& in) {
    LineReader r(in);
    r.expect_header("SVF");
    const std::string field = field_line(r);
    const int ambient = r.keyword_int("ambient", 1, 4096);
    if (field == "real") return Vector(r.row(ambient, "signal row"));
    return AnySignal(parse_complex_row(r, ambient, "signal row"));
}

void write_report(std::ostream& out, const Report& report) {
    out << "SRP 1\n";
    out << "mode " << report.mode << '\n';
    out << "verdict " << report.verdict << '\n';
    for (const std::string& note : report.notes) out << "note " << note << '\n';
    if (report.witness_matrix) {
        const Matrix& c = *report.witness_matrix;
        out << "witness_matrix " << c.rows() << '\n';
        for (int i = 0; i < c.rows(); ++i) write_real_row(out, c.row(i));
    }
    if (report.witness_pair) {
        out << "witness_pair " << report.witness_pair->first.size() << '\n';
        write_real_row(out, report.witness_pair->first.transpose());
        write_real_row(out, report.witness_pair->second.transpose());
    }
    if (report.residuals) {
        out << "residuals " << report.residuals->size() << '\n';
        write_real_row(out, report.residuals->transpose());
    }
}

Report read_report(std::istream& in) {
    LineReader r(in);
    r.expect_header("SRP");
    Report report;
    const auto mode = r.require("'mode <word>'");
    if (mode.size() != 2 || mode[0] != "mode") r.fail("expected 'mode <word>'");
    report.mode = mode[1];
    const auto verdict = r.require("'verdict <word>'");
    if (verdict.size() != 2 || verdict[0] != "verdict") r.fail("expected 'verdict <word>'");
    report.verdict = verdict[1];

    std::vector<std::string> t;
    while (r.next(t)) {
        if (t[0] == "note") {
            std::string note;
            for (std::size_t i = 1; i < t.size(); ++i) {
                if (i > 1) note += ' ';
                note += t[i];
            }
            report.notes.push_back(note);
        } else if (t[0] == "witness_matrix" && t.size() == 2) {
            const int m = static_cast<int>(r.to_int(t[1]));
            if (m < 1 || m > 4096) r.fail("witness matrix size out of range");
            Matrix c(m, m);
            for (int i = 0; i < m; ++i) c.row(i) = r.row(m, "witness matrix row").transpose();
            report.witness_matrix = std::move(c);
        } else if (t[0] == "witness_pair" && t.size() == 2) {
            const int m = static_cast<int>(r.to_int(t[1]));
            if (m < 1 || m > 4096) r.fail("witness pair size out of range");
            Vector u = r.row(m, "witness pair row");
            Vector v = r.row(m, "witness pair row");
            report.witness_pair = std::make_pair(std::move(u), std::move(v));
        } else if (t[0] == "residuals" && t.size() == 2) {
            const int k = static_cast<int>(r.to_int(t[1]));
            if (k < 1 || k > (1 << 20)) r.fail("residual count out of range");
            report.residuals = r.row(k, "residuals row");
        } else {
            r.fail("unknown report section '" + t[0] + "'");
        }
    }
    return report;
}

void save_family(const std::string& path, const AnyFamily& fam) {
    open_and_write(path, fam, &write_family);
}
AnyFamily load_family(const std::string& path) { return open_and_read(path, &read_family); }

void save_recipe(const std::string& path, const Recipe& recipe) {
    open_and_write(path, recipe, &write_recipe);
}
Recipe load_recipe(const std::string& path) { return open_and_read(path, &read_recipe); }

void save_measurement(const std::string& path, const MeasurementVector& meas) {
    open_and_write(path, meas, &write_measurement);
}
MeasurementVector load_measurement(const std::string& path) {
    return open_and_read(path, &read_measurement);
}

void save_signal(const std::string& path, const AnySignal& signal) {
    open_and_write(path, signal, &write_signal);
}
AnySignal load_signal(const std::string& path) { return open_and_read(path, &read_signal); }

void save_report(const std::string& path, const Report& report) {
    open_and_write(path, report, &write_report);
}
Report load_report(const std::string& path) { return open_and_read(path, &read_report); }

}  // namespace spr
