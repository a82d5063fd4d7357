#include <cstdio>
#include <istream>
#include <map>
#include <ostream>
#include <string>

#include "amrec/error.hpp"
#include "amrec/factor.hpp"
#include "text_util.hpp"

// Model file layout, version 1:
//
//   amrec-model<TAB>1<TAB>m=..<TAB>n=..<TAB>k=..<TAB>variant=..<TAB>... (key=value)
//   T<TAB>0<TAB>v v v ...
//   ...
//   M<TAB>0<TAB>v v v ...
//
// Values are written with %.17g so that reloading reproduces every bit.

namespace amrec {

namespace {

constexpr std::string_view kMagic = "amrec-model";
constexpr int kVersion = 1;

std::string render(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

void write_rows(std::ostream& out, char tag, const FactorMatrix& X) {
    for (Eigen::Index i = 0; i < X.rows(); ++i) {
        out << tag << '\t' << i << '\t';
        for (Eigen::Index c = 0; c < X.cols(); ++c) {
            if (c) out << ' ';
            out << render(X(i, c));
        }
        out << '\n';
    }
}

}  // namespace

void save_model(std::ostream& out, const FactorModel& model) {
    const auto& hp = model.hp;
    out << kMagic << '\t' << kVersion << "\tm=" << model.tasks.rows() << "\tn=" << model.methods.rows()
        << "\tk=" << hp.k << "\tvariant=" << to_string(hp.variant) << "\tlambda_t=" << render(hp.lambda_t)
        << "\tlambda_m=" << render(hp.lambda_m) << "\tbeta=" << render(hp.beta)
        << "\tw0=" << render(hp.confidence_w0) << "\tmax_sweeps=" << hp.max_sweeps
        << "\trel_tol=" << render(hp.rel_tol) << "\tseed=" << hp.seed
        << "\tupdate=" << to_string(hp.update_mode) << "\tmethods_first=" << (hp.methods_first ? 1 : 0)
        << "\tsweeps=" << (model.objective_trace.empty() ? 0 : model.objective_trace.size() - 1)
        << "\tobjective=" << (model.objective_trace.empty() ? std::string("nan") : render(model.objective_trace.back()))
        << '\n';
    write_rows(out, 'T', model.tasks);
    write_rows(out, 'M', model.methods);
}

FactorModel load_model(std::istream& in, const std::string& source) {
    std::string raw;
    std::size_t line_no = 1;
    if (!std::getline(in, raw)) throw ParseError(source, line_no, "empty model file");

    const auto header = detail::split_tabs(detail::strip_cr(raw));
    if (header.size() < 2 || header[0] != kMagic) throw ParseError(source, line_no, "not an amrec model file");
    if (detail::parse_int<int>(header[1]) != kVersion) {
        throw ParseError(source, line_no, "unsupported model version '" + std::string(header[1]) + "'");
    }
    std::map<std::string, std::string, std::less<>> kv;
    for (std::size_t f = 2; f < header.size(); ++f) {
        const auto eq = header[f].find('=');
        if (eq == std::string_view::npos) throw ParseError(source, line_no, "bad header field");
        kv.emplace(std::string(header[f].substr(0, eq)), std::string(header[f].substr(eq + 1)));
    }
    auto field = [&](std::string_view key) -> const std::string& {
        auto it = kv.find(key);
        if (it == kv.end()) throw ParseError(source, line_no, "header lacks '" + std::string(key) + "'");
        return it->second;
    };
    auto as_int = [&](std::string_view key) {
        const auto v = detail::parse_int<long long>(field(key));
        if (!v || *v < 0) throw ParseError(source, line_no, "bad integer for '" + std::string(key) + "'");
        return *v;
    };
    auto as_double = [&](std::string_view key) {
        const auto v = detail::parse_double(field(key));
        if (!v) throw ParseError(source, line_no, "bad number for '" + std::string(key) + "'");
        return *v;
    };

    FactorModel model;
    auto& hp = model.hp;
    const auto m = as_int("m");
    const auto n = as_int("n");
    hp.k = static_cast<std::size_t>(as_int("k"));
    const auto variant = parse_variant(field("variant"));
    if (!variant) throw ParseError(source, line_no, "unknown variant");
    hp.variant = *variant;
    hp.lambda_t = as_double("lambda_t");
    hp.lambda_m = as_double("lambda_m");
    hp.beta = as_double("beta");
    hp.confidence_w0 = as_double("w0");
    hp.max_sweeps = static_cast<int>(as_int("max_sweeps"));
    hp.rel_tol = as_double("rel_tol");
    hp.seed = static_cast<std::uint64_t>(as_int("seed"));
    const auto mode = parse_update_mode(field("update"));
    if (!mode) throw ParseError(source, line_no, "unknown update mode");
    hp.update_mode = *mode;
    hp.methods_first = as_int("methods_first") != 0;

    const auto k = static_cast<Eigen::Index>(hp.k);
    model.tasks.resize(static_cast<Eigen::Index>(m), k);
    model.methods.resize(static_cast<Eigen::Index>(n), k);
    std::vector<bool> seen_t(static_cast<std::size_t>(m)), seen_m(static_cast<std::size_t>(n));

    while (std::getline(in, raw)) {
        ++line_no;
        const auto line = detail::strip_cr(raw);
        if (line.empty()) continue;
        const auto fields = detail::split_tabs(line);
        if (fields.size() != 3 || (fields[0] != "T" && fields[0] != "M")) {
            throw ParseError(source, line_no, "expected T|M<TAB>index<TAB>values");
        }
        const bool is_task = fields[0] == "T";
        auto& X = is_task ? model.tasks : model.methods;
        auto& seen = is_task ? seen_t : seen_m;
        const auto idx = detail::parse_int<long long>(fields[1]);
        if (!idx || *idx < 0 || *idx >= X.rows()) throw ParseError(source, line_no, "row index out of range");
        if (seen[static_cast<std::size_t>(*idx)]) throw ParseError(source, line_no, "duplicate row");
        seen[static_cast<std::size_t>(*idx)] = true;

        std::string_view values = fields[2];
        for (Eigen::Index c = 0; c < k; ++c) {
            const auto sp = values.find(' ');
            const auto token = values.substr(0, sp);
            const auto v = detail::parse_double(token);
            if (!v) throw ParseError(source, line_no, "bad value '" + std::string(token) + "'");
            X(*idx, c) = *v;
            if (sp == std::string_view::npos) {
                if (c + 1 != k) throw ParseError(source, line_no, "too few values");
                values = {};
            } else {
                values.remove_prefix(sp + 1);
            }
        }
        if (!values.empty()) throw ParseError(source, line_no, "too many values");
    }
    for (bool s : seen_t) {
        if (!s) throw ParseError(source, line_no, "missing task row");
    }
    for (bool s : seen_m) {
        if (!s) throw ParseError(source, line_no, "missing method row");
    }
    return model;
}

}  // namespace amrec
