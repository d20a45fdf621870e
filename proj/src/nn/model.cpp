#include "throwsense/nn/model.hpp"

namespace throwsense::nn {

ModelWeights Model::export_weights() {
    ModelWeights w;
    for (Param* p : params()) {
        WeightLayer layer;
        layer.name = p->name;
        layer.shape.assign(p->value.shape.begin(), p->value.shape.end());
        layer.values = p->value.values;
        w.layers.push_back(std::move(layer));
    }
    return w;
}

void Model::import_weights(const ModelWeights& w) {
    auto ps = params();
    if (w.layers.size() != ps.size()) {
        throw ShapeMismatch("weight file has " + std::to_string(w.layers.size()) + " layers, model has " +
                            std::to_string(ps.size()));
    }
    for (std::size_t i = 0; i < ps.size(); ++i) {
        const WeightLayer& layer = w.layers[i];
        if (layer.name != ps[i]->name) {
            throw ShapeMismatch("weight layer '" + layer.name + "' does not match model layer '" +
                                ps[i]->name + "'");
        }
        std::vector<std::size_t> shape(layer.shape.begin(), layer.shape.end());
        if (shape != ps[i]->value.shape) {
            throw ShapeMismatch("weight layer '" + layer.name + "' has the wrong shape");
        }
        ps[i]->value.values = layer.values;
    }
}

} // namespace throwsense::nn
