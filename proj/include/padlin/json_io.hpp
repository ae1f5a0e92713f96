#pragma once

#include <json.hpp>

#include "padlin/certificate.hpp"
#include "padlin/oracle.hpp"

namespace padlin::json_io {

using nlohmann::json;

// Input schema: {"k": int, "p": "<dec>", "a": ["<dec>", ...], "b": [...]}
// with all big integers as decimal strings.
json system_to_json(const DiagLinSystem& sys, const Int& p, unsigned long k);
DiagLinSystem system_from_json(const json& j, Int* p, unsigned long* k);

json certificate_to_json(const Certificate& cert);
Certificate certificate_from_json(const json& j);

json oracle_report_to_json(const oracle::OracleReport& rep);

} // namespace padlin::json_io
