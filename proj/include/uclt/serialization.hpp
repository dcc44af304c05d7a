#pragma once

// JSON forms of the library's value types. Infinite support bounds are written as null.

#include <filesystem>
#include <vector>

#include <json.hpp>

#include "uclt/entropy_integrals.hpp"
#include "uclt/psi.hpp"
#include "uclt/tail.hpp"

namespace uclt {

using Json = nlohmann::ordered_json;

Json to_json(const PsiFunction& psi);
PsiFunction psi_from_json(const Json& j);

Json to_json(const MomentCurve& curve);
MomentCurve moment_curve_from_json(const Json& j);

Json to_json(const TailFunction& tail);
TailFunction tail_from_json(const Json& j);

Json to_json(const IntegralReport& report, bool include_trace = false);
Json to_json(const VerdictRecord& record);

/// Non-finite doubles become null; JSON has no representation for them.
Json finite_or_null(double x);

/// Writes `# key=value` provenance lines, a header and the integrand trace.
void write_trace_csv(const IntegralReport& report, const std::filesystem::path& path,
                     const std::vector<std::pair<std::string, std::string>>& provenance = {});

/// Writes `text` with LF line endings, replacing the file atomically.
void write_text_file(const std::filesystem::path& path, const std::string& text);

/// Shortest round-tripping decimal form of x.
std::string format_double(double x);

}  // namespace uclt
