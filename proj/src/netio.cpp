#include "dig/netio.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace dig {

namespace {

using nlohmann::json;

int resolve_site(const std::string& token, const DynamicNetwork& net) {
    for (int i = 0; i < static_cast<int>(net.names.size()); ++i)
        if (net.names[i] == token) return i;
    try {
        std::size_t used = 0;
        const int index = std::stoi(token, &used);
        if (used == token.size() && index >= 1 && index <= net.n) return index - 1;
    } catch (const std::exception&) {
    }
    throw ValidationError("network config: unknown site '" + token + "'");
}

Link parse_link(const std::string& text, const DynamicNetwork& net) {
    const auto arrow = text.find("->");
    if (arrow == std::string::npos)
        throw ValidationError("network config: link '" + text + "' lacks '->'");
    const std::string from = text.substr(0, arrow);
    std::string rest = text.substr(arrow + 2);
    Link link;
    const auto colon = rest.find(':');
    if (colon != std::string::npos) {
        const std::string weight = rest.substr(colon + 1);
        rest = rest.substr(0, colon);
        try {
            link.weight = std::stod(weight);
        } catch (const std::exception&) {
            throw ValidationError("network config: bad link weight in '" + text + "'");
        }
    }
    link.from = resolve_site(from, net);
    link.to = resolve_site(rest, net);
    return link;
}

} // namespace

DynamicNetwork parse_network(const std::string& json_text) {
    json doc;
    try {
        doc = json::parse(json_text);
    } catch (const json::exception& e) {
        throw ValidationError(std::string("network config: not valid JSON: ") + e.what());
    }

    DynamicNetwork net;
    try {
        if (!doc.contains("sites")) throw ValidationError("network config: missing 'sites'");
        if (doc["sites"].is_number_integer()) {
            net.n = doc["sites"].get<int>();
        } else if (doc["sites"].is_array()) {
            net.names = doc["sites"].get<std::vector<std::string>>();
            net.n = static_cast<int>(net.names.size());
        } else {
            throw ValidationError("network config: 'sites' must be a count or a name array");
        }

        if (!doc.contains("seasons") || !doc["seasons"].is_array() || doc["seasons"].empty())
            throw ValidationError("network config: missing 'seasons' array");

        net.schedule.breakpoints.push_back(0.0);
        for (const json& season : doc["seasons"]) {
            if (!season.contains("end_fraction") || !season.contains("growth"))
                throw ValidationError("network config: every season needs end_fraction and growth");
            net.schedule.breakpoints.push_back(season["end_fraction"].get<double>());

            SeasonLayer layer;
            const auto growth = season["growth"].get<std::vector<double>>();
            layer.growth = Eigen::Map<const Vector>(growth.data(), growth.size());
            if (season.contains("links"))
                for (const json& entry : season["links"])
                    layer.links.push_back(parse_link(entry.get<std::string>(), net));
            if (season.contains("self_drain")) {
                const auto drain = season["self_drain"].get<std::vector<double>>();
                layer.self_drain = Eigen::Map<const Vector>(drain.data(), drain.size());
            }
            net.layers.push_back(std::move(layer));
        }
    } catch (const json::exception& e) {
        throw ValidationError(std::string("network config: malformed field: ") + e.what());
    }
    net.validate();
    return net;
}

std::string serialize_network(const DynamicNetwork& net) {
    json doc;
    if (!net.names.empty())
        doc["sites"] = net.names;
    else
        doc["sites"] = net.n;
    doc["seasons"] = json::array();
    for (int k = 0; k < net.seasons(); ++k) {
        const SeasonLayer& layer = net.layers[k];
        json season;
        season["end_fraction"] = net.schedule.breakpoints[k + 1];
        season["growth"] = std::vector<double>(layer.growth.data(),
                                               layer.growth.data() + layer.growth.size());
        json links = json::array();
        for (const Link& link : layer.links) {
            std::ostringstream os;
            os << link.from + 1 << "->" << link.to + 1;
            if (link.weight != 1.0) {
                char buf[32];
                std::snprintf(buf, sizeof buf, "%.17g", link.weight);
                os << ':' << buf;
            }
            links.push_back(os.str());
        }
        season["links"] = std::move(links);
        if (layer.self_drain.size() > 0)
            season["self_drain"] = std::vector<double>(
                layer.self_drain.data(), layer.self_drain.data() + layer.self_drain.size());
        doc["seasons"].push_back(std::move(season));
    }
    return doc.dump(2) + "\n";
}

DynamicNetwork load_network(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open network config '" + path + "'");
    std::ostringstream buffer;
    buffer << in.rdbuf();
    if (in.bad()) throw IoError("error reading '" + path + "'");
    return parse_network(buffer.str());
}

void write_file_atomic(const std::string& path, const std::string& contents) {
    const std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::trunc);
        if (!out) throw IoError("cannot open '" + tmp + "' for writing");
        out << contents;
        out.flush();
        if (!out) throw IoError("error writing '" + tmp + "'");
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) throw IoError("cannot rename '" + tmp + "' to '" + path + "': " + ec.message());
}

void save_network(const DynamicNetwork& net, const std::string& path) {
    write_file_atomic(path, serialize_network(net));
}

} // namespace dig
