#include "zefoz/config.hpp"

#include <fstream>
#include <sstream>

#include "json.hpp"
#include "zefoz/units.hpp"

namespace zefoz {
namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& what) { throw ConfigError("config: " + what); }

const json& require(const json& node, const std::string& key, const std::string& where) {
    auto it = node.find(key);
    if (it == node.end()) fail("missing key '" + key + "' in " + where);
    return *it;
}

double quantity(const json& node, const std::string& dimension, const std::string& where) {
    try {
        if (node.is_number()) {
            if (dimension != "dimensionless") {
                fail(where + " needs an explicit unit suffix (e.g. \"10 MHz\")");
            }
            return node.get<double>();
        }
        if (node.is_string()) return parse_quantity(node.get<std::string>(), dimension);
    } catch (const std::invalid_argument& e) {
        fail(where + ": " + e.what());
    }
    fail(where + " must be a number or a quantity string");
}

Vec3 quantity3(const json& node, const std::string& dimension, const std::string& where) {
    if (!node.is_array() || node.size() != 3) fail(where + " must be a 3-element array");
    return {quantity(node[0], dimension, where), quantity(node[1], dimension, where),
            quantity(node[2], dimension, where)};
}

InteractionTensor tensor(const json& node, const std::string& dimension,
                         const std::string& where) {
    const Vec3 pv = quantity3(require(node, "principal_values", where), dimension, where);
    Vec3 euler{};
    if (node.contains("euler_zyz_deg")) {
        euler = quantity3(node["euler_zyz_deg"], "dimensionless", where + ".euler_zyz_deg");
        for (double& e : euler) e *= kPi / 180.0;
    }
    return InteractionTensor::from_euler_zyz(pv, euler[0], euler[1], euler[2]);
}

SweepSpec sweep(const json& node, const std::string& dimension, const std::string& where) {
    SweepSpec s;
    const auto& range = require(node, "range", where);
    if (!range.is_array() || range.size() != 2) fail(where + ".range must be [start, stop]");
    s.start = quantity(range[0], dimension, where + ".range");
    s.stop = quantity(range[1], dimension, where + ".range");
    s.steps = require(node, "steps", where).get<int>();
    if (s.steps < 2) fail(where + ".steps must be at least 2");
    if (!(s.stop > s.start)) fail(where + ".range must be increasing");
    return s;
}

FieldVector field_vector(const json& node, const std::string& where) {
    const Vec3 v = quantity3(node, "field", where);
    return FieldVector::from_components(v);
}

// FNV-1a over the canonical (sorted-key, no-whitespace) serialization, so
// that formatting-only edits do not change the digest.
std::string digest_of(const json& doc) {
    const std::string canon = doc.dump();
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : canon) {
        h ^= c;
        h *= 1099511628211ull;
    }
    std::ostringstream out;
    out << std::hex << h;
    return out.str();
}

}  // namespace

std::vector<double> SweepSpec::grid() const {
    std::vector<double> g(steps);
    for (int i = 0; i < steps; ++i) {
        g[i] = start + (stop - start) * static_cast<double>(i) / (steps - 1);
    }
    return g;
}

Axis parse_axis(const std::string& name) {
    if (name == "d1" || name == "D1") return Axis::d1;
    if (name == "d2" || name == "D2") return Axis::d2;
    if (name == "b") return Axis::b;
    fail("unknown axis '" + name + "' (expected d1, d2, or b)");
}

std::string axis_name(Axis axis) {
    switch (axis) {
        case Axis::d1: return "d1";
        case Axis::d2: return "d2";
        case Axis::b: return "b";
    }
    return "?";
}

RunConfig parse_config_text(const std::string& text, const std::string& source_path) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        fail(source_path + ": " + e.what());
    }
    if (!doc.is_object()) fail("top level must be an object");

    RunConfig cfg;
    cfg.source_path = source_path;
    cfg.digest = digest_of(doc);

    const auto& spin = require(doc, "spin_system", "config");
    cfg.system.a_ground = tensor(require(spin, "a_ground", "spin_system"), "frequency",
                                 "spin_system.a_ground");
    cfg.system.g_ground = tensor(require(spin, "g_ground", "spin_system"), "dimensionless",
                                 "spin_system.g_ground");
    if (spin.contains("a_excited")) {
        cfg.system.a_excited = tensor(spin["a_excited"], "frequency", "spin_system.a_excited");
    }
    if (spin.contains("g_excited")) {
        cfg.system.g_excited = tensor(spin["g_excited"], "dimensionless", "spin_system.g_excited");
    }
    if (spin.contains("gamma_host")) {
        cfg.system.gamma_host_hz_per_t =
            quantity(spin["gamma_host"], "gyromagnetic", "spin_system.gamma_host");
    }
    try {
        cfg.system.validate();
    } catch (const std::invalid_argument& e) {
        fail(std::string("spin_system: ") + e.what());
    }

    if (doc.contains("nuclei")) {
        const auto& list = doc["nuclei"];
        if (!list.is_array()) fail("nuclei must be an array");
        for (const auto& entry : list) {
            HostNucleus n;
            n.gamma_hz_per_t = cfg.system.gamma_host_hz_per_t;
            if (entry.contains("position")) {
                n.position_m = quantity3(entry["position"], "length", "nuclei[].position");
            }
            if (entry.contains("coupling")) {
                const auto& c = entry["coupling"];
                if (!c.is_array() || c.size() != 2) fail("nuclei[].coupling must be [a, b]");
                n.coupling_hz = {quantity(c[0], "frequency", "nuclei[].coupling"),
                                 quantity(c[1], "frequency", "nuclei[].coupling")};
            }
            if (entry.contains("gamma")) {
                n.gamma_hz_per_t = quantity(entry["gamma"], "gyromagnetic", "nuclei[].gamma");
            }
            try {
                n.validate();
            } catch (const std::invalid_argument& e) {
                fail(std::string("nuclei: ") + e.what());
            }
            cfg.nuclei.push_back(n);
        }
    }

    if (doc.contains("transition")) {
        const auto& tr = doc["transition"];
        if (tr.contains("level")) {
            const std::string lv = tr["level"].get<std::string>();
            if (lv == "ground") cfg.level = Level::ground;
            else if (lv == "excited") cfg.level = Level::excited;
            else fail("transition.level must be 'ground' or 'excited'");
        }
        if (tr.contains("pair")) {
            const auto& p = tr["pair"];
            if (!p.is_array() || p.size() != 2) fail("transition.pair must be [k, l]");
            // Levels are 1-based in config files, 0-based in the API.
            const int k = p[0].get<int>(), l = p[1].get<int>();
            if (k < 1 || k > 4 || l < 1 || l > 4 || k >= l) {
                fail("transition.pair must satisfy 1 <= k < l <= 4");
            }
            cfg.pair = {k - 1, l - 1};
        }
    }

    if (doc.contains("model")) {
        const auto& m = doc["model"];
        if (m.contains("e0")) cfg.model.e0 = quantity(m["e0"], "dimensionless", "model.e0");
        if (m.contains("t2_zero")) cfg.model.t2_zero_s = quantity(m["t2_zero"], "time", "model.t2_zero");
        if (m.contains("kappa")) {
            cfg.model.kappa_hz_per_t = quantity(m["kappa"], "gyromagnetic", "model.kappa");
        }
        if (m.contains("b0")) cfg.model.b0_tesla = quantity(m["b0"], "field", "model.b0");
        if (m.contains("mims_m")) {
            cfg.model.mims_m = quantity(m["mims_m"], "dimensionless", "model.mims_m");
        }
        if (!(cfg.model.t2_zero_s > 0.0) || cfg.model.mims_m < 0.5 || cfg.model.mims_m > 4.0) {
            fail("model: t2_zero must be positive and mims_m in [0.5, 4]");
        }
    }

    const json sweeps = doc.contains("sweeps") ? doc["sweeps"] : json::object();

    if (sweeps.contains("s1_map")) {
        const auto& node = sweeps["s1_map"];
        S1MapConfig m;
        m.axis1 = parse_axis(require(node, "axis1", "s1_map").get<std::string>());
        m.axis2 = parse_axis(require(node, "axis2", "s1_map").get<std::string>());
        if (m.axis1 == m.axis2) fail("s1_map axes must differ");
        m.sweep1 = sweep(require(node, "sweep1", "s1_map"), "field", "s1_map.sweep1");
        m.sweep2 = sweep(require(node, "sweep2", "s1_map"), "field", "s1_map.sweep2");
        if (node.contains("offset")) m.offset_tesla = quantity(node["offset"], "field", "s1_map.offset");
        if (node.contains("angle_scan_magnitude")) {
            m.angle_scan_magnitude_tesla =
                quantity(node["angle_scan_magnitude"], "field", "s1_map.angle_scan_magnitude");
        }
        cfg.s1_map = m;
    }

    if (sweeps.contains("echo_map")) {
        const auto& node = sweeps["echo_map"];
        EchoMapConfig m;
        m.swept_axis = parse_axis(require(node, "swept_axis", "echo_map").get<std::string>());
        m.sweep = sweep(require(node, "sweep", "echo_map"), "field", "echo_map.sweep");
        m.offset_axis = parse_axis(require(node, "offset_axis", "echo_map").get<std::string>());
        if (m.swept_axis == m.offset_axis) fail("echo_map axes must differ");
        if (node.contains("offset")) {
            m.offset_tesla = quantity(node["offset"], "field", "echo_map.offset");
        }
        m.tau = sweep(require(node, "tau", "echo_map"), "time", "echo_map.tau");
        cfg.echo_map = m;
    }

    if (sweeps.contains("eseem")) {
        const auto& node = sweeps["eseem"];
        EseemConfig e;
        e.field = field_vector(require(node, "field", "eseem"), "eseem.field");
        e.tau = sweep(require(node, "tau", "eseem"), "time", "eseem.tau");
        cfg.eseem = e;
    }

    if (sweeps.contains("rabi")) {
        const auto& node = sweeps["rabi"];
        RabiConfig r;
        r.rabi_frequency_hz =
            quantity(require(node, "rabi_frequency", "rabi"), "frequency", "rabi.rabi_frequency");
        if (node.contains("sigma")) r.sigma_hz = quantity(node["sigma"], "frequency", "rabi.sigma");
        r.time = sweep(require(node, "time", "rabi"), "time", "rabi.time");
        if (node.contains("quadrature_nodes")) r.quadrature_nodes = node["quadrature_nodes"].get<int>();
        if (!(r.rabi_frequency_hz > 0.0) || r.sigma_hz < 0.0) {
            fail("rabi: frequency must be positive, sigma non-negative");
        }
        cfg.rabi = r;
    }

    if (sweeps.contains("zefoz")) {
        const auto& node = sweeps["zefoz"];
        ZefozConfig z;
        if (node.contains("bound")) z.bound_tesla = quantity(node["bound"], "field", "zefoz.bound");
        if (node.contains("starts")) z.starts = node["starts"].get<int>();
        if (node.contains("bias")) z.bias = field_vector(node["bias"], "zefoz.bias");
        if (!(z.bound_tesla > 0.0) || z.starts < 1) {
            fail("zefoz: bound must be positive and starts >= 1");
        }
        cfg.zefoz = z;
    }

    return cfg;
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail("cannot open '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config_text(buf.str(), path);
}

}  // namespace zefoz
