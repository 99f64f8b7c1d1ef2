#include "schema.hpp"

#include <cmath>
#include <sstream>

#include "schema_text.hpp"

namespace idsctl {

namespace {

using nlohmann::json;

std::string type_of(const json& v) {
    if (v.is_null()) return "null";
    if (v.is_boolean()) return "boolean";
    if (v.is_number_integer() || v.is_number_unsigned()) return "integer";
    if (v.is_number()) return "number";
    if (v.is_string()) return "string";
    if (v.is_array()) return "array";
    return "object";
}

bool has_type(const json& v, const std::string& type) {
    const std::string t = type_of(v);
    if (t == type) return true;
    if (type == "number" && t == "integer") return true;
    // 3.0 is an integer in JSON Schema terms.
    if (type == "integer" && t == "number") return std::floor(v.get<double>()) == v.get<double>();
    return false;
}

std::string show(const json& v) {
    std::string s = v.dump();
    return s.size() > 40 ? s.substr(0, 37) + "..." : s;
}

void check(const json& schema, const json& v, const std::string& path, std::vector<std::string>& out) {
    if (auto t = schema.find("type"); t != schema.end() && !has_type(v, t->get<std::string>())) {
        out.push_back(path + ": expected " + t->get<std::string>() + ", got " + type_of(v) + " " + show(v));
        return;
    }
    if (auto e = schema.find("enum"); e != schema.end()) {
        bool found = false;
        for (const json& option : *e) found = found || option == v;
        if (!found) out.push_back(path + ": " + show(v) + " is not one of " + e->dump());
    }
    if (v.is_number()) {
        const double x = v.get<double>();
        auto bound = [&](const char* key, auto violates, const char* text) {
            if (auto b = schema.find(key); b != schema.end() && violates(x, b->template get<double>())) {
                std::ostringstream os;
                os << path << ": " << show(v) << ' ' << text << ' ' << b->dump();
                out.push_back(os.str());
            }
        };
        bound("minimum", [](double a, double b) { return a < b; }, "is below the minimum");
        bound("maximum", [](double a, double b) { return a > b; }, "exceeds the maximum");
        bound("exclusiveMinimum", [](double a, double b) { return a <= b; }, "must be greater than");
        bound("exclusiveMaximum", [](double a, double b) { return a >= b; }, "must be less than");
    }
    if (v.is_array()) {
        if (auto m = schema.find("minItems"); m != schema.end() && v.size() < m->get<std::size_t>()) {
            out.push_back(path + ": needs at least " + m->dump() + " items");
        }
        if (auto m = schema.find("maxItems"); m != schema.end() && v.size() > m->get<std::size_t>()) {
            out.push_back(path + ": allows at most " + m->dump() + " items");
        }
        if (auto items = schema.find("items"); items != schema.end()) {
            for (std::size_t i = 0; i < v.size(); ++i) check(*items, v[i], path + "[" + std::to_string(i) + "]", out);
        }
    }
    if (v.is_object()) {
        const json empty = json::object();
        auto props = schema.find("properties");
        const json& known = props != schema.end() ? *props : empty;
        if (auto req = schema.find("required"); req != schema.end()) {
            for (const json& name : *req) {
                if (!v.contains(name.get<std::string>())) {
                    out.push_back(path + "." + name.get<std::string>() + ": required field is missing");
                }
            }
        }
        const bool closed = schema.value("additionalProperties", true) == false;
        for (auto it = v.begin(); it != v.end(); ++it) {
            const std::string child = path + "." + it.key();
            if (auto p = known.find(it.key()); p != known.end()) {
                check(*p, it.value(), child, out);
            } else if (closed) {
                out.push_back(child + ": unknown field");
            }
        }
    }
}

}  // namespace

std::vector<std::string> schema_violations(const nlohmann::json& schema, const nlohmann::json& document) {
    std::vector<std::string> out;
    check(schema, document, "$", out);
    return out;
}

const nlohmann::json& config_schema() {
    static const nlohmann::json schema = nlohmann::json::parse(kConfigSchemaText);
    return schema;
}

}  // namespace idsctl
