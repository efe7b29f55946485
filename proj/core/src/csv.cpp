#include "avate/csv.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace avate::csv {

namespace {

std::string fmt(const char* spec, double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), spec, v);
    return buf;
}

std::vector<std::string> split_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string cur;
    for (char c : line) {
        if (c == ',') {
            fields.push_back(cur);
            cur.clear();
        } else if (c != '\r') {
            cur += c;
        }
    }
    fields.push_back(cur);
    return fields;
}

double parse_double(const std::string& s, const std::string& where) {
    try {
        std::size_t pos = 0;
        const double v = std::stod(s, &pos);
        if (pos != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw DataError("could not parse number '" + s + "' in " + where);
    }
}

std::int64_t parse_int(const std::string& s, const std::string& where) {
    try {
        std::size_t pos = 0;
        const long long v = std::stoll(s, &pos);
        if (pos != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw DataError("could not parse integer '" + s + "' in " + where);
    }
}

}  // namespace

std::string format_report(double v) { return fmt("%.12g", v); }
std::string format_exact(double v) { return fmt("%.17g", v); }

struct TrajectoryWriter::Impl {
    std::ofstream out;
};

TrajectoryWriter::TrajectoryWriter(const std::string& path) : impl_(new Impl) {
    impl_->out.open(path);
    if (!impl_->out) throw DataError("cannot open trajectory output '" + path + "'");
    impl_->out << "iter,t,method,lower,upper,width,covered,rejects_zero,h,pi1,k\n";
}

TrajectoryWriter::~TrajectoryWriter() { delete impl_; }

void TrajectoryWriter::flush() { impl_->out.flush(); }

void TrajectoryWriter::write(const IterationResult& result, double theta0) {
    std::ostringstream buf;
    for (std::size_t i = 0; i < result.scores.size(); ++i) {
        const ScoreRecord& sc = result.scores[i];
        for (int m = 0; m < kMethodCount; ++m) {
            if (result.intervals[m].size() <= i) continue;
            const Interval& iv = result.intervals[m][i];
            const int covered = std::isnan(theta0) ? -1 : (iv.contains(theta0) ? 1 : 0);
            const int rejects = iv.contains(0.0) ? 0 : 1;
            buf << result.iter << ',' << sc.t << ',' << kMethodNames[m] << ','
                << format_report(iv.lower) << ',' << format_report(iv.upper) << ','
                << format_report(iv.width()) << ',' << covered << ',' << rejects << ','
                << format_report(sc.h) << ',' << format_report(sc.pi1) << ','
                << format_report(sc.k) << '\n';
        }
    }
    impl_->out << buf.str();
}

void write_aggregate(const std::string& path, const AggregateResult& agg) {
    std::ofstream out(path);
    if (!out) throw DataError("cannot open aggregate output '" + path + "'");
    out << "method,t,cum_miscoverage,cum_power,mean_width\n";
    for (int m = 0; m < kMethodCount; ++m) {
        if (!agg.present[m]) continue;
        for (std::int64_t t = 1; t <= agg.horizon; ++t) {
            out << kMethodNames[m] << ',' << t << ',' << format_report(agg.cum_miscoverage[m][t - 1])
                << ',' << format_report(agg.cum_power[m][t - 1]) << ','
                << format_report(agg.mean_width[m][t - 1]) << '\n';
        }
    }
}

void write_scores(const std::string& path, const std::vector<ScoreRecord>& scores) {
    std::ofstream out(path);
    if (!out) throw DataError("cannot open scores output '" + path + "'");
    out << "t,h,pi1,k,f1_hat,f0_hat\n";
    for (const ScoreRecord& sc : scores) {
        out << sc.t << ',' << format_report(sc.h) << ',' << format_report(sc.pi1) << ','
            << format_report(sc.k) << ',' << format_report(sc.f1_hat) << ','
            << format_report(sc.f0_hat) << '\n';
    }
}

void write_stream(const std::string& path, const IterationResult& result,
                  const std::vector<ScoreRecord>& scores) {
    if (result.contexts.empty() || result.contexts.size() != scores.size()) {
        throw std::logic_error("write_stream: iteration was run without stream capture");
    }
    std::ofstream out(path);
    if (!out) throw DataError("cannot open stream output '" + path + "'");
    const std::size_t dim = result.contexts.front().size();
    out << "t";
    for (std::size_t j = 1; j <= dim; ++j) out << ",x" << j;
    out << ",a,y,pi1,k\n";
    for (std::size_t i = 0; i < scores.size(); ++i) {
        out << scores[i].t;
        for (double v : result.contexts[i]) out << ',' << format_exact(v);
        out << ',' << result.arms[i] << ',' << format_exact(result.outcomes[i]) << ','
            << format_exact(scores[i].pi1) << ',' << format_exact(scores[i].k) << '\n';
    }
}

std::vector<StreamRow> read_stream(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open stream input '" + path + "'");

    std::string line;
    if (!std::getline(in, line)) throw DataError("stream '" + path + "' is empty");
    const std::vector<std::string> header = split_line(line);
    if (header.size() < 6 || header.front() != "t" || header[header.size() - 4] != "a" ||
        header[header.size() - 3] != "y" || header[header.size() - 2] != "pi1" ||
        header.back() != "k") {
        throw DataError("stream '" + path + "' must have header t,x1..xd,a,y,pi1,k");
    }
    const std::size_t dim = header.size() - 5;

    std::vector<StreamRow> rows;
    std::int64_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        const std::string where = "row " + std::to_string(line_no) + " of '" + path + "'";
        const std::vector<std::string> fields = split_line(line);
        if (fields.size() != header.size()) {
            throw DataError(where + ": expected " + std::to_string(header.size()) + " fields, got " +
                            std::to_string(fields.size()));
        }
        StreamRow row;
        row.t = parse_int(fields[0], where);
        row.x.reserve(dim);
        for (std::size_t j = 0; j < dim; ++j) row.x.push_back(parse_double(fields[1 + j], where));
        row.a = static_cast<int>(parse_int(fields[1 + dim], where));
        row.y = parse_double(fields[2 + dim], where);
        row.pi1 = parse_double(fields[3 + dim], where);
        row.k = parse_double(fields[4 + dim], where);

        const std::int64_t expected_t = static_cast<std::int64_t>(rows.size()) + 1;
        if (row.t != expected_t) {
            throw DataError(where + ": t must increase by 1 from 1 (expected " +
                            std::to_string(expected_t) + ", got " + std::to_string(row.t) + ")");
        }
        if (row.a != 0 && row.a != 1) throw DataError(where + ": arm must be 0 or 1");
        if (!(row.k >= 2.0 - 1e-9)) throw DataError(where + ": k must be >= 2");
        const double tol = 1e-9;
        if (!(row.pi1 >= 1.0 / row.k - tol && row.pi1 <= 1.0 - 1.0 / row.k + tol)) {
            throw DataError(where + ": pi1=" + std::to_string(row.pi1) +
                            " outside [1/k, 1-1/k] for k=" + std::to_string(row.k));
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

void read_trajectory_into(const std::string& path, Aggregator& agg) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open trajectory input '" + path + "'");
    agg.begin_shard();

    std::string line;
    if (!std::getline(in, line)) throw DataError("trajectory '" + path + "' is empty");
    if (split_line(line) !=
        std::vector<std::string>{"iter", "t", "method", "lower", "upper", "width", "covered",
                                 "rejects_zero", "h", "pi1", "k"}) {
        throw DataError("trajectory '" + path + "' has an unexpected header");
    }

    std::int64_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        const std::string where = "row " + std::to_string(line_no) + " of '" + path + "'";
        const std::vector<std::string> f = split_line(line);
        if (f.size() != 11) throw DataError(where + ": expected 11 fields");

        int method = -1;
        for (int m = 0; m < kMethodCount; ++m) {
            if (f[2] == kMethodNames[m]) method = m;
        }
        if (method < 0) throw DataError(where + ": unknown method '" + f[2] + "'");

        agg.add_row(static_cast<std::uint64_t>(parse_int(f[0], where)), parse_int(f[1], where),
                    method, parse_double(f[5], where), static_cast<int>(parse_int(f[6], where)),
                    static_cast<int>(parse_int(f[7], where)));
    }
}

}  // namespace avate::csv
