#include "erglab/model_io.hpp"

#include "erglab/errors.hpp"

#include "json.hpp"

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace erglab {

using json = nlohmann::ordered_json;

namespace {

std::string fmt17(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

}  // namespace

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << content;
}

MarkovModel parse_model_json(const std::string& text, Backend backend) {
    json j = json::parse(text);
    if (!j.contains("states") || !j.contains("kappa") || !j.contains("edges"))
        throw std::runtime_error("model file needs states, kappa, edges");
    std::vector<std::string> names = j["states"].get<std::vector<std::string>>();
    int kappa = j["kappa"].get<int>();
    std::vector<std::vector<Branch>> branches(names.size());
    for (const auto& e : j["edges"]) {
        Branch b;
        int from = e.at("from").get<int>();
        b.to = e.at("to").get<int>();
        if (from < 0 || from >= static_cast<int>(names.size()))
            throw std::runtime_error("edge source out of range");
        if (e.at("weight").is_string())
            b.weight = parse_rational(e.at("weight").get<std::string>());
        else
            b.weight = parse_rational(e.at("weight").dump());
        b.step = e.value("step", std::vector<int>(kappa, 0));
        branches[from].push_back(std::move(b));
    }
    return MarkovModel(static_cast<int>(names.size()), kappa,
                       std::move(branches), backend, std::move(names));
}

std::string model_to_json(const MarkovModel& model) {
    json j;
    j["states"] = model.state_names();
    j["kappa"] = model.kappa();
    json edges = json::array();
    for (int s = 0; s < model.num_states(); ++s)
        for (const auto& b : model.branches()[s]) {
            json e;
            e["from"] = s;
            e["to"] = b.to;
            e["weight"] = format_rational(b.weight);
            e["step"] = b.step;
            edges.push_back(e);
        }
    j["edges"] = edges;
    return j.dump(2) + "\n";
}

MarkovModel load_model(const std::string& path, Backend backend) {
    return parse_model_json(read_text_file(path), backend);
}

SemiflowModel parse_semiflow_json(const std::string& text, Backend backend) {
    json j = json::parse(text);
    MarkovModel base = parse_model_json(j.at("base").dump(), backend);
    std::vector<Rational> roof;
    for (const auto& v : j.at("roof"))
        roof.push_back(parse_rational(v.is_string() ? v.get<std::string>()
                                                    : v.dump()));
    return SemiflowModel(std::move(base), RoofFunction(std::move(roof)));
}

std::string semiflow_to_json(const SemiflowModel& model) {
    json j;
    j["base"] = json::parse(model_to_json(model.base()));
    json roof = json::array();
    for (const auto& v : model.roof().values())
        roof.push_back(format_rational(v));
    j["roof"] = roof;
    return j.dump(2) + "\n";
}

SemiflowModel load_semiflow(const std::string& path, Backend backend) {
    return parse_semiflow_json(read_text_file(path), backend);
}

GroupFile parse_group_json(const std::string& text) {
    json j = json::parse(text);
    std::vector<MobiusMap> gens;
    for (const auto& g : j.at("generators")) {
        Complex a(g.at("a")[0].get<double>(), g.at("a")[1].get<double>());
        Complex b(g.at("b")[0].get<double>(), g.at("b")[1].get<double>());
        gens.emplace_back(a, b);
    }
    std::optional<std::vector<int>> rel;
    if (j.contains("relator") && !j["relator"].is_null())
        rel = j["relator"].get<std::vector<int>>();
    std::string name = j.value("name", std::string("custom"));
    FuchsianGroup group(std::move(gens), rel, name);
    std::optional<ThetaMap> theta;
    if (j.contains("theta_rows") && !j["theta_rows"].is_null()) {
        ThetaMap t;
        for (const auto& row : j["theta_rows"])
            t.rows.push_back(row.get<std::vector<std::int64_t>>());
        theta = std::move(t);
    }
    return GroupFile{std::move(group), std::move(theta)};
}

std::string group_to_json(const FuchsianGroup& group,
                          const std::optional<ThetaMap>& theta) {
    json j;
    j["name"] = group.name();
    json gens = json::array();
    for (int k = 0; k < group.num_pairs(); ++k) {
        const MobiusMap& g = group.letter(2 * k);
        json e;
        e["a"] = {g.a().real(), g.a().imag()};
        e["b"] = {g.b().real(), g.b().imag()};
        gens.push_back(e);
    }
    j["generators"] = gens;
    if (group.relator())
        j["relator"] = *group.relator();
    else
        j["relator"] = nullptr;
    if (theta) {
        json rows = json::array();
        for (const auto& r : theta->rows) rows.push_back(r);
        j["theta_rows"] = rows;
    } else {
        j["theta_rows"] = nullptr;
    }
    return j.dump(2) + "\n";
}

GroupFile load_group(const std::string& path) {
    return parse_group_json(read_text_file(path));
}

namespace {

std::uint64_t group_hash(const FuchsianGroup& G) {
    std::uint64_t h = 1469598103934665603ULL;
    auto mix = [&h](const std::string& s) {
        for (unsigned char c : s) {
            h ^= c;
            h *= 1099511628211ULL;
        }
    };
    for (int k = 0; k < G.num_pairs(); ++k) {
        const auto& g = G.letter(2 * k);
        mix(fmt17(g.a().real()));
        mix(fmt17(g.a().imag()));
        mix(fmt17(g.b().real()));
        mix(fmt17(g.b().imag()));
    }
    return h;
}

std::optional<std::string> cache_path(const FuchsianGroup& G, int max_len) {
    const char* dir = std::getenv("ERGLAB_CACHE_DIR");
    if (!dir || !*dir) return std::nullopt;
    char buf[64];
    std::snprintf(buf, sizeof buf, "enum-%016llx-%d.json",
                  static_cast<unsigned long long>(group_hash(G)), max_len);
    return std::string(dir) + "/" + buf;
}

}  // namespace

std::optional<Enumeration> load_enumeration_cache(const FuchsianGroup& G,
                                                  int max_len) {
    auto path = cache_path(G, max_len);
    if (!path || !std::filesystem::exists(*path)) return std::nullopt;
    json j = json::parse(read_text_file(*path));
    Enumeration E;
    E.max_len = j.at("max_len").get<int>();
    E.ratio_low = j.at("ratio_low").get<double>();
    E.ratio_high = j.at("ratio_high").get<double>();
    E.orbit_dist = j.at("orbit_dist").get<std::vector<double>>();
    for (const auto& e : j.at("elements")) {
        GroupElement g;
        g.map = MobiusMap(
            Complex(e.at("a")[0].get<double>(), e.at("a")[1].get<double>()),
            Complex(e.at("b")[0].get<double>(), e.at("b")[1].get<double>()));
        g.word = e.at("word").get<std::vector<int>>();
        g.length = static_cast<int>(g.word.size());
        g.theta = e.at("theta").get<std::vector<std::int64_t>>();
        E.elements.push_back(std::move(g));
    }
    return E;
}

void store_enumeration_cache(const FuchsianGroup& G, int max_len,
                             const Enumeration& E) {
    auto path = cache_path(G, max_len);
    if (!path) return;
    json j;
    j["max_len"] = E.max_len;
    j["ratio_low"] = E.ratio_low;
    j["ratio_high"] = E.ratio_high;
    j["orbit_dist"] = E.orbit_dist;
    json elems = json::array();
    for (const auto& g : E.elements) {
        json e;
        e["a"] = {g.map.a().real(), g.map.a().imag()};
        e["b"] = {g.map.b().real(), g.map.b().imag()};
        e["word"] = g.word;
        e["theta"] = g.theta;
        elems.push_back(e);
    }
    j["elements"] = elems;
    std::filesystem::create_directories(
        std::filesystem::path(*path).parent_path());
    write_text_file(*path, j.dump() + "\n");
}

Enumeration enumerate_cached(const FuchsianGroup& G, int max_len) {
    if (auto cached = load_enumeration_cache(G, max_len)) return *cached;
    Enumeration E = enumerate_group(G, max_len);
    store_enumeration_cache(G, max_len, E);
    return E;
}

}  // namespace erglab
