#include "hyperpower/io.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <vector>

namespace hyperpower {

namespace {

std::string fmt17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

[[noreturn]] void parse_fail(const std::string& path, std::size_t lineno,
                             const std::string& message) {
    throw std::runtime_error(path + ":" + std::to_string(lineno) + ": " + message);
}

/// Whitespace tokens from a Matrix Market body, tracking line numbers and
/// skipping blank and %-comment lines.
class TokenReader {
 public:
    TokenReader(std::ifstream& in, const std::string& path, std::size_t lineno)
        : in_(in), path_(path), lineno_(lineno) {}

    std::string next(const std::string& what) {
        while (pos_ >= tokens_.size()) {
            std::string line;
            if (!std::getline(in_, line)) {
                parse_fail(path_, lineno_, "unexpected end of file while reading " + what);
            }
            ++lineno_;
            if (!line.empty() && line[0] == '%') continue;
            tokens_.clear();
            pos_ = 0;
            std::istringstream ss(line);
            std::string tok;
            while (ss >> tok) tokens_.push_back(tok);
        }
        return tokens_[pos_++];
    }

    double next_double(const std::string& what) {
        const std::string tok = next(what);
        char* end = nullptr;
        const double v = std::strtod(tok.c_str(), &end);
        if (end != tok.c_str() + tok.size()) {
            parse_fail(path_, lineno_, "non-numeric token '" + tok + "' in " + what);
        }
        if (!std::isfinite(v)) {
            parse_fail(path_, lineno_, "non-finite value '" + tok + "' in " + what);
        }
        return v;
    }

    std::size_t next_index(const std::string& what, std::size_t limit) {
        const std::string tok = next(what);
        char* end = nullptr;
        const long long v = std::strtoll(tok.c_str(), &end, 10);
        if (end != tok.c_str() + tok.size() || v < 1) {
            parse_fail(path_, lineno_, "bad index '" + tok + "' in " + what);
        }
        if (static_cast<std::size_t>(v) > limit) {
            parse_fail(path_, lineno_,
                       "index " + tok + " out of range (size " + std::to_string(limit) + ")");
        }
        return static_cast<std::size_t>(v);
    }

    std::size_t next_count(const std::string& what) {
        const std::string tok = next(what);
        char* end = nullptr;
        const long long v = std::strtoll(tok.c_str(), &end, 10);
        if (end != tok.c_str() + tok.size() || v < 0) {
            parse_fail(path_, lineno_, "bad count '" + tok + "' in " + what);
        }
        return static_cast<std::size_t>(v);
    }

    std::size_t lineno() const { return lineno_; }

 private:
    std::ifstream& in_;
    const std::string& path_;
    std::size_t lineno_;
    std::vector<std::string> tokens_;
    std::size_t pos_ = 0;
};

std::string lowercased(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return s;
}

template <typename Scalar>
void write_matrix_market_impl(const DenseMatrix<Scalar>& m, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error(path + ": cannot open for writing");
    out << "%%MatrixMarket matrix array "
        << (is_complex_v<Scalar> ? "complex" : "real") << " general\n";
    out << m.rows() << " " << m.cols() << "\n";
    for (std::size_t j = 0; j < m.cols(); ++j) {
        for (std::size_t i = 0; i < m.rows(); ++i) {
            if constexpr (is_complex_v<Scalar>) {
                out << fmt17(m(i, j).real()) << " " << fmt17(m(i, j).imag()) << "\n";
            } else {
                out << fmt17(m(i, j)) << "\n";
            }
        }
    }
    if (!out.good()) throw std::runtime_error(path + ": write failed");
}

template <typename Scalar>
void export_trace_impl(const SolveReport<Scalar>& report, TraceFormat format,
                       const std::string& path, std::optional<std::uint64_t> seed) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error(path + ": cannot open for writing");
    const std::size_t n = report.x.rows();

    if (format == TraceFormat::csv) {
        out << "# method=" << method_name(report.method) << "\n";
        out << "# n=" << n << "\n";
        out << "# epsilon=" << fmt17(report.config.epsilon) << "\n";
        if (seed) out << "# seed=" << *seed << "\n";
        out << "k,alpha,beta,res_norm,fallback,wall_ns\n";
        for (const IterationRecord& r : report.trace) {
            out << r.k << "," << fmt17(r.alpha) << "," << fmt17(r.beta) << ","
                << fmt17(r.res_norm) << "," << (r.fallback ? 1 : 0) << "," << r.wall_ns
                << "\n";
        }
    } else {
        out << "{\n";
        out << "  \"method\": \"" << method_name(report.method) << "\",\n";
        out << "  \"n\": " << n << ",\n";
        out << "  \"epsilon\": " << fmt17(report.config.epsilon) << ",\n";
        if (seed) out << "  \"seed\": " << *seed << ",\n";
        out << "  \"final_res\": " << fmt17(report.final_res) << ",\n";
        out << "  \"iterations\": " << report.iterations << ",\n";
        out << "  \"converged\": " << (report.converged ? "true" : "false") << ",\n";
        out << "  \"matmul_count\": " << report.matmul_count << ",\n";
        out << "  \"reason\": \"" << report.reason << "\",\n";
        out << "  \"trace\": [";
        for (std::size_t i = 0; i < report.trace.size(); ++i) {
            const IterationRecord& r = report.trace[i];
            out << (i == 0 ? "\n" : ",\n");
            out << "    {\"k\": " << r.k << ", \"alpha\": " << fmt17(r.alpha)
                << ", \"beta\": " << fmt17(r.beta) << ", \"res_norm\": " << fmt17(r.res_norm)
                << ", \"fallback\": " << (r.fallback ? "true" : "false")
                << ", \"wall_ns\": " << r.wall_ns << "}";
        }
        out << (report.trace.empty() ? "]\n" : "\n  ]\n");
        out << "}\n";
    }
    if (!out.good()) throw std::runtime_error(path + ": write failed");
}

}  // namespace

MatrixVariant read_matrix_market(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error(path + ": cannot open file");

    std::string header;
    if (!std::getline(in, header)) parse_fail(path, 1, "empty file");
    std::istringstream hs(header);
    std::string banner, object, format, field, symmetry;
    hs >> banner >> object >> format >> field >> symmetry;
    if (lowercased(banner) != "%%matrixmarket") {
        parse_fail(path, 1, "missing %%MatrixMarket banner");
    }
    if (lowercased(object) != "matrix") parse_fail(path, 1, "unsupported object '" + object + "'");
    format = lowercased(format);
    field = lowercased(field);
    symmetry = lowercased(symmetry);
    if (format != "array" && format != "coordinate") {
        parse_fail(path, 1, "unsupported format '" + format + "'");
    }
    if (field != "real" && field != "complex") {
        parse_fail(path, 1, "unsupported field '" + field + "'");
    }
    if (symmetry != "general" && symmetry != "symmetric") {
        parse_fail(path, 1, "unsupported symmetry '" + symmetry + "'");
    }
    const bool complex_field = field == "complex";
    const bool symmetric = symmetry == "symmetric";

    TokenReader tok(in, path, 1);
    const std::size_t rows = tok.next_index("size line", static_cast<std::size_t>(-1));
    const std::size_t cols = tok.next_index("size line", static_cast<std::size_t>(-1));
    if (symmetric && rows != cols) {
        parse_fail(path, tok.lineno(), "symmetric matrix must be square");
    }

    RealMatrix mr(complex_field ? 0 : rows, complex_field ? 0 : cols);
    ComplexMatrix mc(complex_field ? rows : 0, complex_field ? cols : 0);
    auto store = [&](std::size_t i, std::size_t j, double re, double im) {
        if (complex_field) {
            mc(i, j) = {re, im};
        } else {
            mr(i, j) = re;
        }
    };

    if (format == "array") {
        // Column-major; symmetric files carry only the lower triangle.
        for (std::size_t j = 0; j < cols; ++j) {
            for (std::size_t i = symmetric ? j : 0; i < rows; ++i) {
                const double re = tok.next_double("array entry");
                const double im = complex_field ? tok.next_double("array entry") : 0.0;
                store(i, j, re, im);
                if (symmetric && i != j) store(j, i, re, im);
            }
        }
    } else {
        const std::size_t nnz = tok.next_count("size line");
        for (std::size_t e = 0; e < nnz; ++e) {
            const std::size_t i = tok.next_index("coordinate entry", rows) - 1;
            const std::size_t j = tok.next_index("coordinate entry", cols) - 1;
            const double re = tok.next_double("coordinate entry");
            const double im = complex_field ? tok.next_double("coordinate entry") : 0.0;
            store(i, j, re, im);
            if (symmetric && i != j) store(j, i, re, im);
        }
    }

    if (complex_field) return mc;
    return mr;
}

void write_matrix_market(const RealMatrix& m, const std::string& path) {
    write_matrix_market_impl(m, path);
}

void write_matrix_market(const ComplexMatrix& m, const std::string& path) {
    write_matrix_market_impl(m, path);
}

void write_matrix_market(const MatrixVariant& m, const std::string& path) {
    std::visit([&](const auto& mat) { write_matrix_market_impl(mat, path); }, m);
}

void export_trace(const RealSolveReport& report, TraceFormat format, const std::string& path,
                  std::optional<std::uint64_t> seed) {
    export_trace_impl(report, format, path, seed);
}

void export_trace(const ComplexSolveReport& report, TraceFormat format,
                  const std::string& path, std::optional<std::uint64_t> seed) {
    export_trace_impl(report, format, path, seed);
}

}  // namespace hyperpower
