#include "dpfindiff/model.hpp"

#include <cstring>

#include "dpfindiff/errors.hpp"

namespace dpfd {

void TrainableModel::build_layout() {
    layout = ParamLayout{};
    std::size_t off = 0;
    auto place = [&off](std::size_t& slot, std::size_t len) {
        slot = off;
        off += len;
    };
    place(layout.w_in, net.w_in.size());
    place(layout.b_in, net.b_in.size());
    place(layout.p_time, net.p_time.size());
    place(layout.label_emb, net.label_emb.size());
    place(layout.w_h1, net.w_h1.size());
    place(layout.b_h1, net.b_h1.size());
    place(layout.w_h2, net.w_h2.size());
    place(layout.b_h2, net.b_h2.size());
    place(layout.w_out, net.w_out.size());
    place(layout.b_out, net.b_out.size());
    place(layout.numeric_weights, emb.numeric_weights.size());
    layout.category_tables.clear();
    for (const auto& table : emb.category_embeddings) {
        std::size_t slot = 0;
        place(slot, table.size());
        layout.category_tables.push_back(slot);
    }
    layout.total = off;
}

NetGrads TrainableModel::net_grad_view(double* flat) const {
    NetGrads g;
    g.w_in = flat + layout.w_in;
    g.b_in = flat + layout.b_in;
    g.p_time = flat + layout.p_time;
    g.label_emb = flat + layout.label_emb;
    g.w_h1 = flat + layout.w_h1;
    g.b_h1 = flat + layout.b_h1;
    g.w_h2 = flat + layout.w_h2;
    g.b_h2 = flat + layout.b_h2;
    g.w_out = flat + layout.w_out;
    g.b_out = flat + layout.b_out;
    return g;
}

void TrainableModel::for_each_tensor(
    const std::function<void(double*, std::size_t)>& fn) {
    fn(net.w_in.data(), net.w_in.size());
    fn(net.b_in.data(), net.b_in.size());
    fn(net.p_time.data(), net.p_time.size());
    fn(net.label_emb.data(), net.label_emb.size());
    fn(net.w_h1.data(), net.w_h1.size());
    fn(net.b_h1.data(), net.b_h1.size());
    fn(net.w_h2.data(), net.w_h2.size());
    fn(net.b_h2.data(), net.b_h2.size());
    fn(net.w_out.data(), net.w_out.size());
    fn(net.b_out.data(), net.b_out.size());
    fn(emb.numeric_weights.data(), emb.numeric_weights.size());
    for (auto& table : emb.category_embeddings) fn(table.data(), table.size());
}

void TrainableModel::for_each_tensor(
    const std::function<void(const double*, std::size_t)>& fn) const {
    auto& self = const_cast<TrainableModel&>(*this);
    self.for_each_tensor([&fn](double* p, std::size_t n) { fn(p, n); });
}

std::vector<double> TrainableModel::gather_params() const {
    std::vector<double> flat(layout.total);
    std::size_t off = 0;
    for_each_tensor([&](const double* p, std::size_t n) {
        std::memcpy(flat.data() + off, p, n * sizeof(double));
        off += n;
    });
    return flat;
}

void TrainableModel::scatter_params(std::span<const double> flat) {
    if (flat.size() != layout.total) {
        throw DataError("scatter_params: size mismatch");
    }
    std::size_t off = 0;
    for_each_tensor([&](double* p, std::size_t n) {
        std::memcpy(p, flat.data() + off, n * sizeof(double));
        off += n;
    });
}

} // namespace dpfd
