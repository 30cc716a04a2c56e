#include "report.hpp"

#include "errors.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <iomanip>
#include <mutex>
#include <sstream>
#include <thread>

namespace tracelab {

bool CaseRecord::check(double m, const std::optional<double>& lo, const std::optional<double>& hi) {
    if (!std::isfinite(m)) return false;
    if (lo && m < *lo) return false;
    if (hi && m > *hi) return false;
    return true;
}

CaseRecord make_case(std::string id, ojson params, double measured, std::optional<double> lo,
                     std::optional<double> hi, bool gated, std::string note) {
    CaseRecord c;
    c.id = std::move(id);
    c.params = std::move(params);
    c.measured = measured;
    c.lo = lo;
    c.hi = hi;
    c.gated = gated;
    c.note = std::move(note);
    c.pass = CaseRecord::check(measured, lo, hi);
    return c;
}

bool SuiteReport::passed() const { return failed_count() == 0; }

std::size_t SuiteReport::gated_count() const {
    return static_cast<std::size_t>(std::count_if(cases.begin(), cases.end(), [](const auto& c) { return c.gated; }));
}

std::size_t SuiteReport::failed_count() const {
    return static_cast<std::size_t>(
        std::count_if(cases.begin(), cases.end(), [](const auto& c) { return c.gated && !c.pass; }));
}

namespace {

ojson number(double x) {
    if (std::isfinite(x)) return x;
    if (std::isnan(x)) return "nan";
    return x > 0 ? "inf" : "-inf";
}

double number_from(const ojson& j) {
    if (j.is_number()) return j.get<double>();
    std::string s = j.get<std::string>();
    if (s == "inf") return INFINITY;
    if (s == "-inf") return -INFINITY;
    return NAN;
}

std::string fmt(double x) {
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    std::ostringstream os;
    os << std::setprecision(17) << x;
    return os.str();
}

std::string csv_quote(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + "\"";
}

}  // namespace

ojson to_json(const SuiteReport& r) {
    ojson j;
    j["schema"] = kReportSchema;
    j["suite"] = r.suite;
    j["passed"] = r.passed();
    j["gated_cases"] = r.gated_count();
    j["failed_cases"] = r.failed_count();
    j["config"] = r.config;
    j["aggregate"] = r.aggregate;
    j["wall_time_s"] = r.wall_time;
    ojson cases = ojson::array();
    for (const auto& c : r.cases) {
        ojson e;
        e["id"] = c.id;
        e["params"] = c.params;
        e["measured"] = number(c.measured);
        e["lo"] = c.lo ? number(*c.lo) : ojson(nullptr);
        e["hi"] = c.hi ? number(*c.hi) : ojson(nullptr);
        e["gated"] = c.gated;
        e["pass"] = c.pass;
        if (!c.note.empty()) e["note"] = c.note;
        cases.push_back(std::move(e));
    }
    j["cases"] = std::move(cases);
    return j;
}

SuiteReport report_from_json(const ojson& j) {
    try {
        if (j.at("schema").get<std::string>() != kReportSchema)
            throw Error(Status::Parse, "unsupported report schema " + j.at("schema").get<std::string>());
        SuiteReport r;
        r.suite = j.at("suite").get<std::string>();
        r.config = j.at("config");
        r.aggregate = j.at("aggregate");
        r.wall_time = j.at("wall_time_s").get<double>();
        for (const auto& e : j.at("cases")) {
            CaseRecord c;
            c.id = e.at("id").get<std::string>();
            c.params = e.at("params");
            c.measured = number_from(e.at("measured"));
            if (!e.at("lo").is_null()) c.lo = number_from(e.at("lo"));
            if (!e.at("hi").is_null()) c.hi = number_from(e.at("hi"));
            c.gated = e.at("gated").get<bool>();
            c.pass = e.at("pass").get<bool>();
            c.note = e.value("note", std::string());
            r.cases.push_back(std::move(c));
        }
        return r;
    } catch (const ojson::exception& e) {
        throw Error(Status::Parse, std::string("report JSON: ") + e.what());
    }
}

std::string to_csv(const SuiteReport& r) {
    std::ostringstream os;
    os << "case_id,gated,pass,measured,lo,hi,params,note\n";
    for (const auto& c : r.cases) {
        os << csv_quote(c.id) << ',' << (c.gated ? 1 : 0) << ',' << (c.pass ? 1 : 0) << ',' << fmt(c.measured) << ','
           << (c.lo ? fmt(*c.lo) : "") << ',' << (c.hi ? fmt(*c.hi) : "") << ',' << csv_quote(c.params.dump()) << ','
           << csv_quote(c.note) << '\n';
    }
    return os.str();
}

std::string render(const SuiteReport& r, const std::string& format) {
    if (format == "json") return to_json(r).dump(2) + "\n";
    if (format == "csv") return to_csv(r);
    throw Error(Status::Arg, "unknown report format: " + format);
}

int thread_budget() {
    if (const char* e = std::getenv("TRACELAB_THREADS")) {
        char* end = nullptr;
        long v = std::strtol(e, &end, 10);
        if (end != e && v >= 1) return static_cast<int>(std::min<long>(v, 256));
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

void parallel_for(std::size_t n, int threads, const std::function<void(std::size_t)>& fn) {
    std::size_t workers = std::min<std::size_t>(n, static_cast<std::size_t>(std::max(1, threads)));
    if (workers <= 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr err;
    std::mutex mu;
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w)
        pool.emplace_back([&] {
            for (std::size_t i; (i = next.fetch_add(1)) < n;) {
                try {
                    fn(i);
                } catch (...) {
                    std::lock_guard<std::mutex> lock(mu);
                    if (!err) err = std::current_exception();
                }
            }
        });
    for (auto& t : pool) t.join();
    if (err) std::rethrow_exception(err);
}

}  // namespace tracelab
