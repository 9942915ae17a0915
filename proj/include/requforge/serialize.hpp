#pragma once

// JSON wire format for networks and build reports.
//
// Network document:
//   {"input_dim": d, "activation": "requ",
//    "layers": [{"weights": [[row 0...], [row 1...]], "bias": [...]}, ...]}
// with the final layer understood as affine-only. Doubles round-trip
// bit-exactly (shortest-round-trip serialization).

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "requforge/approximator.hpp"
#include "requforge/requ.hpp"

namespace requforge {

using Json = nlohmann::ordered_json;

class ParseError : public std::runtime_error {
public:
    explicit ParseError(const std::string& what) : std::runtime_error(what) {}
};

inline Json network_to_json(const Network& net) {
    Json doc;
    doc["input_dim"] = net.input_dim();
    doc["activation"] = "requ";
    Json layers = Json::array();
    for (const Layer& layer : net.layers()) {
        Json jl;
        Json rows = Json::array();
        for (int i = 0; i < layer.weights.rows; ++i) {
            Json row = Json::array();
            for (int j = 0; j < layer.weights.cols; ++j) row.push_back(layer.weights.at(i, j));
            rows.push_back(std::move(row));
        }
        jl["weights"] = std::move(rows);
        jl["bias"] = layer.bias;
        layers.push_back(std::move(jl));
    }
    doc["layers"] = std::move(layers);
    return doc;
}

inline std::string save_network(const Network& net) { return network_to_json(net).dump(1); }

inline Network network_from_json(const Json& doc) {
    if (!doc.is_object()) throw ParseError("network document: expected a JSON object");
    if (!doc.contains("input_dim") || !doc["input_dim"].is_number_integer())
        throw ParseError("network document: missing or non-integer field 'input_dim'");
    const int input_dim = doc["input_dim"].get<int>();
    if (!doc.contains("activation") || !doc["activation"].is_string() ||
        doc["activation"].get<std::string>() != "requ")
        throw ParseError("network document: field 'activation' must be the string \"requ\"");
    if (!doc.contains("layers") || !doc["layers"].is_array() || doc["layers"].empty())
        throw ParseError("network document: field 'layers' must be a non-empty array");

    std::vector<Layer> layers;
    int prev = input_dim;
    for (std::size_t l = 0; l < doc["layers"].size(); ++l) {
        const Json& jl = doc["layers"][l];
        const std::string where = "layers[" + std::to_string(l) + "]";
        if (!jl.is_object() || !jl.contains("weights") || !jl["weights"].is_array() || jl["weights"].empty())
            throw ParseError("network document: " + where + ".weights must be a non-empty array of rows");
        if (!jl.contains("bias") || !jl["bias"].is_array())
            throw ParseError("network document: " + where + ".bias must be an array");
        const Json& rows = jl["weights"];
        const int out = static_cast<int>(rows.size());
        Layer layer;
        layer.weights = Matrix(out, prev);
        for (int i = 0; i < out; ++i) {
            const Json& row = rows[static_cast<std::size_t>(i)];
            if (!row.is_array() || static_cast<int>(row.size()) != prev)
                throw ParseError("network document: " + where + ".weights[" + std::to_string(i) +
                                 "] must have " + std::to_string(prev) + " entries");
            for (int j = 0; j < prev; ++j) {
                if (!row[static_cast<std::size_t>(j)].is_number())
                    throw ParseError("network document: " + where + ".weights[" + std::to_string(i) +
                                     "][" + std::to_string(j) + "] is not a number");
                layer.weights.at(i, j) = row[static_cast<std::size_t>(j)].get<double>();
            }
        }
        if (static_cast<int>(jl["bias"].size()) != out)
            throw ParseError("network document: " + where + ".bias must have " + std::to_string(out) +
                             " entries");
        layer.bias.resize(static_cast<std::size_t>(out));
        for (int i = 0; i < out; ++i) {
            if (!jl["bias"][static_cast<std::size_t>(i)].is_number())
                throw ParseError("network document: " + where + ".bias[" + std::to_string(i) +
                                 "] is not a number");
            layer.bias[static_cast<std::size_t>(i)] = jl["bias"][static_cast<std::size_t>(i)].get<double>();
        }
        prev = out;
        layers.push_back(std::move(layer));
    }
    try {
        return Network(input_dim, std::move(layers));
    } catch (const std::invalid_argument& e) {
        throw ParseError(std::string("network document: ") + e.what());
    }
}

inline Network load_network(const std::string& text) {
    if (text.empty()) throw ParseError("network document: empty input");
    Json doc = Json::parse(text, nullptr, false);
    if (doc.is_discarded()) throw ParseError("network document: malformed JSON");
    return network_from_json(doc);
}

inline Json report_to_json(const BuildReport& rep) {
    Json doc;
    doc["predicted_L"] = rep.predicted_hidden;
    doc["predicted_N"] = rep.predicted_width;
    doc["measured"] = {{"hidden_layers", rep.measured.hidden_layers},
                       {"max_width", rep.measured.max_width},
                       {"nonzero_weights", rep.measured.nonzero_weights}};
    doc["eps"] = rep.eps;
    doc["M"] = rep.spec.M;
    doc["c"] = rep.spec.c;
    doc["clip_bound"] = rep.clip_bound;
    doc["fn"] = rep.fn_name;
    doc["d"] = rep.d;
    doc["r"] = rep.r;
    doc["R"] = rep.R;
    doc["domain"] = rep.spec.domain_half_width;
    return doc;
}

}  // namespace requforge
