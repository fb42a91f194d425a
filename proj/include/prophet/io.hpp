#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "prophet/evaluation.hpp"
#include "prophet/families.hpp"
#include "prophet/instance.hpp"

namespace prophet::io {

// Instance files: {"boxes": [{"support": [[value, prob], ...]}, ...]}
// Order files:    {"order": [ids...]}

/// Parses and validates an instance. Throws ValidationError on malformed JSON
/// or violated invariants.
Instance parse_instance(const nlohmann::json& doc, bool require_unique_max = false, double baseline = 0.0);
Instance load_instance(const std::filesystem::path& path, bool require_unique_max = false, double baseline = 0.0);
nlohmann::json instance_json(const Instance& instance);

/// The raw boxes of an instance document, before any validation.
std::vector<RawBox> parse_raw_boxes(const nlohmann::json& doc);

Order parse_order(const nlohmann::json& doc, std::size_t n);
nlohmann::json order_json(const Order& order);

/// "0,2,1" inline, or a path to an order file.
Order resolve_order(std::string_view arg, std::size_t n);

/// "0,1,2;0,2,1" inline, or a path to {"orders": [[...], ...]}.
std::vector<Order> resolve_orders(std::string_view arg, std::size_t n);

nlohmann::json eval_json(const EvalResult& result);
nlohmann::json ratio_json(const RatioReport& report, const std::string& method = "exact-dp");

/// Columns: order, alg, opt, ratio, method.
std::string ratio_csv(const RatioReport& report, const std::string& method = "exact-dp");

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, const std::string& text);

}  // namespace prophet::io
