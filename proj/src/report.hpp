#pragma once

#include <json.hpp>

#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace tracelab {

using ojson = nlohmann::ordered_json;

inline constexpr const char* kReportSchema = "tracelab.report/1";

/// One case: pass == measured finite and inside [lo, hi] (missing bounds are open).
struct CaseRecord {
    std::string id;
    ojson params = ojson::object();
    double measured = 0.0;
    std::optional<double> lo, hi;
    bool gated = true;
    bool pass = false;
    std::string note;

    static bool check(double measured, const std::optional<double>& lo, const std::optional<double>& hi);
};

CaseRecord make_case(std::string id, ojson params, double measured, std::optional<double> lo,
                     std::optional<double> hi, bool gated = true, std::string note = {});

struct SuiteReport {
    std::string suite;
    ojson config = ojson::object();
    std::vector<CaseRecord> cases;  // sorted by id
    ojson aggregate = ojson::object();
    double wall_time = 0.0;

    bool passed() const;
    std::size_t gated_count() const;
    std::size_t failed_count() const;
};

ojson to_json(const SuiteReport& r);
SuiteReport report_from_json(const ojson& j);
/// Columns: case_id, gated, pass, measured, lo, hi, params, note.
std::string to_csv(const SuiteReport& r);
std::string render(const SuiteReport& r, const std::string& format);

/// Worker count: TRACELAB_THREADS if set (>= 1), else hardware concurrency.
int thread_budget();
/// Runs fn(i) for i in [0, n) on at most `threads` workers.
void parallel_for(std::size_t n, int threads, const std::function<void(std::size_t)>& fn);

}  // namespace tracelab
