// presets.cpp — bundled experiment configurations loadable by name

#include "corrnoise/config.hpp"

#include <map>

namespace corrnoise {

namespace {

// Ohmic transverse bath shared by the relaxation experiments.
#define CN_OHMIC_FULL R"({"coupling": "transverse", "spectrum": {"kind": "ohmic", "strength": 1e-5, "cutoff": 10}, "correlation": {"kind": "full"}})"
#define CN_DETUNED R"("frequencies": [0.9950, 0.9975, 1.0000, 1.0025, 1.0050])"

const std::map<std::string, std::string>& table() {
    static const std::map<std::string, std::string> presets = {
        {"fig1a", R"({
  "name": "fig1a",
  "description": "Detuned five-qubit register, fully correlated ohmic relaxation from the inverted state",
  "register": {"n": 5, )" CN_DETUNED R"(},
  "channels": [)" CN_OHMIC_FULL R"(],
  "initial_state": "inverted",
  "t_max": 35000, "dt_out": 50,
  "analysis": {"antidiagonals": false}
})"},
        {"fig1b", R"({
  "name": "fig1b",
  "description": "Resonant five-qubit register, fully correlated ohmic relaxation",
  "register": {"n": 5, "uniform_frequency": 1.0},
  "channels": [)" CN_OHMIC_FULL R"(],
  "initial_state": "inverted",
  "t_max": 35000, "dt_out": 50,
  "analysis": {"antidiagonals": false}
})"},
        {"fig1c", R"({
  "name": "fig1c",
  "description": "Resonant register, ohmic relaxation correlated within a window of three qubits",
  "register": {"n": 5, "uniform_frequency": 1.0},
  "channels": [{"coupling": "transverse", "spectrum": {"kind": "ohmic", "strength": 1e-5, "cutoff": 10},
                "correlation": {"kind": "window", "range": 3}}],
  "initial_state": "inverted",
  "t_max": 35000, "dt_out": 50,
  "analysis": {"antidiagonals": false}
})"},
        {"fig2", R"({
  "name": "fig2",
  "description": "Correlated relaxation plus fully correlated 1/f dephasing probed by parity oscillations",
  "register": {"n": 5, )" CN_DETUNED R"(},
  "channels": [)" CN_OHMIC_FULL R"(,
               {"coupling": "longitudinal", "spectrum": {"kind": "one_over_f", "strength": 1e-9, "ir_cutoff": 1e-6},
                "correlation": {"kind": "full"}}],
  "initial_state": "plus_all",
  "t_max": 4000, "dt_out": 10,
  "protocol": {"kind": "parity", "idle_times": [0, 1000, 2000, 3000, 4000]},
  "analysis": {"partial_intensity": false}
})"},
        {"fig2d", R"({
  "name": "fig2d",
  "description": "As fig2 but with spatially uncorrelated 1/f dephasing",
  "register": {"n": 5, )" CN_DETUNED R"(},
  "channels": [)" CN_OHMIC_FULL R"(,
               {"coupling": "longitudinal", "spectrum": {"kind": "one_over_f", "strength": 1e-9, "ir_cutoff": 1e-6},
                "correlation": {"kind": "diagonal"}}],
  "initial_state": "plus_all",
  "t_max": 4000, "dt_out": 10,
  "protocol": {"kind": "parity", "idle_times": [0, 1000, 2000, 3000, 4000]},
  "analysis": {"partial_intensity": false}
})"},
        {"t1", R"({
  "name": "t1",
  "description": "Single qubit ohmic relaxation from the excited state",
  "register": {"n": 1, "uniform_frequency": 1.0},
  "channels": [)" CN_OHMIC_FULL R"(],
  "initial_state": "inverted",
  "t_max": 40000, "dt_out": 100,
  "integrator": {"step": 1.0}
})"},
        {"dfs", R"({
  "name": "dfs",
  "description": "Four qubits under fully correlated 1/f dephasing only; the k = 0 cluster is protected",
  "register": {"n": 4, "uniform_frequency": 1.0},
  "channels": [{"coupling": "longitudinal", "spectrum": {"kind": "one_over_f", "strength": 1e-9, "ir_cutoff": 1e-6},
                "correlation": {"kind": "full"}}],
  "initial_state": "plus_all",
  "t_max": 8000, "dt_out": 20,
  "protocol": {"kind": "parity", "idle_times": [0, 2000, 4000, 6000, 8000]}
})"},
        {"dfs5", R"({
  "name": "dfs5",
  "description": "Five qubits under fully correlated 1/f dephasing only",
  "register": {"n": 5, "uniform_frequency": 1.0},
  "channels": [{"coupling": "longitudinal", "spectrum": {"kind": "one_over_f", "strength": 1e-9, "ir_cutoff": 1e-6},
                "correlation": {"kind": "full"}}],
  "initial_state": "plus_all",
  "t_max": 8000, "dt_out": 20,
  "protocol": {"kind": "parity", "idle_times": [0, 2000, 4000, 6000, 8000]}
})"},
        {"superdecoherence", R"({
  "name": "superdecoherence",
  "description": "Fully correlated white dephasing swept over register size",
  "register": {"n": 2, "uniform_frequency": 1.0},
  "channels": [{"coupling": "longitudinal", "spectrum": {"kind": "white", "strength": 1e-3},
                "correlation": {"kind": "full"}}],
  "initial_state": "plus_all",
  "t_max": 100, "dt_out": 1,
  "protocol": {"kind": "parity", "idle_times": [0, 10, 20, 30, 40, 50]},
  "sweep": {"n_values": [2, 3, 4, 5]}
})"},
        {"superdecoherence_local", R"({
  "name": "superdecoherence_local",
  "description": "Uncorrelated white dephasing swept over register size",
  "register": {"n": 2, "uniform_frequency": 1.0},
  "channels": [{"coupling": "longitudinal", "spectrum": {"kind": "white", "strength": 1e-3},
                "correlation": {"kind": "diagonal"}}],
  "initial_state": "plus_all",
  "t_max": 100, "dt_out": 1,
  "protocol": {"kind": "parity", "idle_times": [0, 10, 20, 30, 40, 50]},
  "sweep": {"n_values": [2, 3, 4, 5]}
})"},
        {"quiet", R"({
  "name": "quiet",
  "description": "Noise-free register; every intensity column is identically zero",
  "register": {"n": 3, "uniform_frequency": 1.0},
  "channels": [],
  "initial_state": "inverted",
  "t_max": 10, "dt_out": 1
})"},
    };
    return presets;
}

#undef CN_OHMIC_FULL
#undef CN_DETUNED

} // namespace

std::vector<std::string> preset_names() {
    std::vector<std::string> out;
    for (const auto& [k, v] : table()) out.push_back(k);
    return out;
}

std::optional<std::string> preset_text(const std::string& name) {
    const auto& t = table();
    if (auto it = t.find(name); it != t.end()) return it->second;
    return std::nullopt;
}

} // namespace corrnoise
