#include "prophet/io.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

namespace prophet::io {

using nlohmann::json;

namespace {

std::vector<BoxId> parse_id_list(std::string_view text) {
    std::vector<BoxId> ids;
    std::size_t start = 0;
    while (start <= text.size()) {
        const std::size_t comma = std::min(text.find(',', start), text.size());
        std::string_view token = text.substr(start, comma - start);
        while (!token.empty() && token.front() == ' ') token.remove_prefix(1);
        while (!token.empty() && token.back() == ' ') token.remove_suffix(1);
        BoxId id = 0;
        auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), id);
        if (token.empty() || ec != std::errc() || ptr != token.data() + token.size()) {
            throw ValidationError("bad box id '" + std::string(token) + "' in order '" + std::string(text) + "'");
        }
        ids.push_back(id);
        start = comma + 1;
    }
    return ids;
}

bool looks_inline(std::string_view arg) {
    return !arg.empty() && arg.find_first_not_of("0123456789, ;") == std::string_view::npos;
}

json parse_json_text(const std::string& text, const std::string& what) {
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        throw ValidationError(what + " is not valid JSON: " + e.what());
    }
}

std::string format_double(double x) {
    std::ostringstream out;
    out.precision(17);
    out << x;
    return out.str();
}

}  // namespace

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ValidationError("cannot open " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void write_file(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << text;
}

std::vector<RawBox> parse_raw_boxes(const json& doc) {
    if (!doc.is_object() || !doc.contains("boxes") || !doc["boxes"].is_array()) {
        throw ValidationError("instance document needs a \"boxes\" array");
    }
    std::vector<RawBox> boxes;
    for (std::size_t id = 0; id < doc["boxes"].size(); ++id) {
        const json& box = doc["boxes"][id];
        if (!box.is_object() || !box.contains("support") || !box["support"].is_array()) {
            throw ValidationError("box " + std::to_string(id) + " needs a \"support\" array");
        }
        RawBox raw;
        for (const json& pair : box["support"]) {
            if (!pair.is_array() || pair.size() != 2 || !pair[0].is_number() || !pair[1].is_number()) {
                throw ValidationError("box " + std::to_string(id) + ": support entries must be [value, prob]");
            }
            raw.push_back({pair[0].get<double>(), pair[1].get<double>()});
        }
        boxes.push_back(std::move(raw));
    }
    return boxes;
}

Instance parse_instance(const json& doc, bool require_unique_max, double baseline) {
    const auto raw = parse_raw_boxes(doc);
    return Instance::from_raw(raw, require_unique_max, baseline);
}

Instance load_instance(const std::filesystem::path& path, bool require_unique_max, double baseline) {
    return parse_instance(parse_json_text(read_file(path), path.string()), require_unique_max, baseline);
}

json instance_json(const Instance& instance) {
    json boxes = json::array();
    for (const auto& box : instance.boxes()) {
        json support = json::array();
        for (const auto& o : box.outcomes()) support.push_back({o.value, o.prob});
        boxes.push_back({{"support", support}});
    }
    return {{"boxes", boxes}};
}

Order parse_order(const json& doc, std::size_t n) {
    if (!doc.is_object() || !doc.contains("order") || !doc["order"].is_array()) {
        throw ValidationError("order document needs an \"order\" array");
    }
    std::vector<BoxId> ids;
    for (const json& id : doc["order"]) {
        if (!id.is_number_unsigned() && !(id.is_number_integer() && id.get<long long>() >= 0)) {
            throw ValidationError("order entries must be non-negative integers");
        }
        ids.push_back(id.get<BoxId>());
    }
    return Order(std::move(ids), n);
}

json order_json(const Order& order) { return {{"order", std::vector<BoxId>(order.sequence().begin(), order.sequence().end())}}; }

Order resolve_order(std::string_view arg, std::size_t n) {
    if (looks_inline(arg)) return Order(parse_id_list(arg), n);
    const std::string path(arg);
    return parse_order(parse_json_text(read_file(path), path), n);
}

std::vector<Order> resolve_orders(std::string_view arg, std::size_t n) {
    std::vector<Order> orders;
    if (looks_inline(arg)) {
        std::size_t start = 0;
        while (start <= arg.size()) {
            const std::size_t semi = std::min(arg.find(';', start), arg.size());
            orders.emplace_back(parse_id_list(arg.substr(start, semi - start)), n);
            start = semi + 1;
        }
        return orders;
    }
    const std::string path(arg);
    const json doc = parse_json_text(read_file(path), path);
    if (doc.is_object() && doc.contains("order")) {
        orders.push_back(parse_order(doc, n));
        return orders;
    }
    if (!doc.is_object() || !doc.contains("orders") || !doc["orders"].is_array()) {
        throw ValidationError(path + " needs an \"orders\" array");
    }
    for (const json& entry : doc["orders"]) orders.push_back(parse_order(json{{"order", entry}}, n));
    return orders;
}

json eval_json(const EvalResult& result) {
    json out{{"value", result.value}, {"method", to_string(result.method)}};
    if (result.samples) out["samples"] = *result.samples;
    if (result.std_error) out["stderr"] = *result.std_error;
    return out;
}

json ratio_json(const RatioReport& report, const std::string& method) {
    json rows = json::array();
    for (const auto& row : report.per_order) {
        rows.push_back({{"order", order_json(row.order)["order"]},
                        {"alg", row.alg},
                        {"opt", row.opt},
                        {"ratio", row.ratio},
                        {"degenerate", row.degenerate},
                        {"method", method}});
    }
    return {{"per_order", rows},
            {"min_ratio", report.min_ratio},
            {"argmin_order", order_json(report.argmin_order())["order"]}};
}

std::string ratio_csv(const RatioReport& report, const std::string& method) {
    std::string out = "order,alg,opt,ratio,method\n";
    for (const auto& row : report.per_order) {
        out += row.order.to_string() + "," + format_double(row.alg) + "," + format_double(row.opt) + "," +
               format_double(row.ratio) + "," + method + "\n";
    }
    return out;
}

}  // namespace prophet::io
