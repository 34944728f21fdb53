#include <algorithm>
#include <cmath>
#include <limits>
#include <tuple>

#include "medbuild/massing.hpp"

namespace medbuild::massing {

namespace {

// Compact packing tries this many seed cells per room; the first eligible
// seeds in cell order keep rooms near the start of their axis.
constexpr std::size_t kSeedLimit = 64;

struct FloorState {
    std::vector<std::vector<std::size_t>> adj;
    std::vector<char> used;
    long long remaining = 0;
};

std::vector<std::size_t> component_sizes(const FloorState& st, std::vector<std::size_t>& label) {
    const std::size_t none = std::numeric_limits<std::size_t>::max();
    label.assign(st.used.size(), none);
    std::vector<std::size_t> sizes;
    for (std::size_t s = 0; s < st.used.size(); ++s) {
        if (st.used[s] || label[s] != none) continue;
        const std::size_t id = sizes.size();
        std::vector<std::size_t> queue{s};
        label[s] = id;
        for (std::size_t qi = 0; qi < queue.size(); ++qi) {
            for (std::size_t t : st.adj[queue[qi]]) {
                if (!st.used[t] && label[t] == none) {
                    label[t] = id;
                    queue.push_back(t);
                }
            }
        }
        sizes.push_back(queue.size());
    }
    return sizes;
}

double perimeter(const std::vector<std::size_t>& block, const std::vector<GridCell>& cells) {
    double x0 = 1e300, y0 = 1e300, x1 = -1e300, y1 = -1e300;
    for (std::size_t i : block) {
        x0 = std::min(x0, cells[i].cx);
        y0 = std::min(y0, cells[i].cy);
        x1 = std::max(x1, cells[i].cx);
        y1 = std::max(y1, cells[i].cy);
    }
    return 2.0 * ((x1 - x0) + (y1 - y0));
}

// Greedy growth from `seed`: each step adds the free neighbour that keeps the
// block's bounding box smallest. Always succeeds inside a large enough component.
std::vector<std::size_t> grow(std::size_t seed, long long k, const FloorState& st, const std::vector<GridCell>& cells) {
    std::vector<std::size_t> block{seed};
    std::vector<char> in(st.used.size(), 0);
    in[seed] = 1;
    double x0 = cells[seed].cx, y0 = cells[seed].cy, x1 = x0, y1 = y0;
    while (static_cast<long long>(block.size()) < k) {
        std::size_t best = std::numeric_limits<std::size_t>::max();
        double best_p = 1e300;
        for (std::size_t b : block) {
            for (std::size_t t : st.adj[b]) {
                if (st.used[t] || in[t]) continue;
                const double p = 2.0 * ((std::max(x1, cells[t].cx) - std::min(x0, cells[t].cx)) +
                                        (std::max(y1, cells[t].cy) - std::min(y0, cells[t].cy)));
                if (p < best_p - 1e-6 || (std::fabs(p - best_p) <= 1e-6 && t < best)) {
                    best_p = p;
                    best = t;
                }
            }
        }
        if (best == std::numeric_limits<std::size_t>::max()) return {};
        in[best] = 1;
        block.push_back(best);
        x0 = std::min(x0, cells[best].cx);
        y0 = std::min(y0, cells[best].cy);
        x1 = std::max(x1, cells[best].cx);
        y1 = std::max(y1, cells[best].cy);
    }
    std::sort(block.begin(), block.end());
    return block;
}

std::vector<std::size_t> pack(long long k, const FloorState& st, const std::vector<GridCell>& cells) {
    std::vector<std::size_t> label;
    const std::vector<std::size_t> sizes = component_sizes(st, label);
    std::vector<std::size_t> best;
    double best_p = 1e300;
    std::size_t tried = 0;
    for (std::size_t s = 0; s < cells.size() && tried < kSeedLimit; ++s) {
        if (st.used[s] || static_cast<long long>(sizes[label[s]]) < k) continue;
        ++tried;
        std::vector<std::size_t> block = grow(s, k, st, cells);
        if (block.empty()) continue;
        const double p = perimeter(block, cells);
        if (p < best_p - 1e-6) {
            best_p = p;
            best = std::move(block);
        }
        if (k == 1) break;
    }
    return best;
}

}  // namespace

std::vector<RoomRef> allocation_order(const FunctionalProgram& program, const PlanningConfig& config) {
    struct Entry {
        int rank;
        double area;
        std::string key;
        long long instance;
        RoomRef ref;
    };
    std::vector<Entry> entries;
    for (const RoomSpec& r : program.rooms) {
        const long long modules = static_cast<long long>(std::ceil(r.unit_area / config.massing.module_area - 1e-9));
        for (long long i = 1; i <= r.quantity; ++i) {
            RoomRef ref{r.department + "/" + r.name + "#" + std::to_string(i), r.department, r.name, r.priority, r.unit_area,
                        modules};
            entries.push_back({config.priority_rank(r.priority), r.unit_area, r.department + "/" + r.name, i, std::move(ref)});
        }
    }
    std::stable_sort(entries.begin(), entries.end(), [](const Entry& a, const Entry& b) {
        return std::tie(a.rank, b.area, a.key, a.instance) < std::tie(b.rank, a.area, b.key, b.instance);
    });
    std::vector<RoomRef> out;
    out.reserve(entries.size());
    for (Entry& e : entries) out.push_back(std::move(e.ref));
    return out;
}

Allocation allocate_rooms(const FunctionalProgram& program, FloorStack stack, const PlanningConfig& config) {
    std::vector<FloorState> states;
    for (FloorPlan& f : stack.floors) {
        if (f.cells.empty()) f.cells = generate_structural_grid(f, config.massing);
        FloorState st;
        st.adj = cell_adjacency(f.cells);
        st.used.assign(f.cells.size(), 0);
        st.remaining = f.capacity;
        states.push_back(std::move(st));
    }
    Allocation out;
    for (const RoomRef& room : allocation_order(program, config)) {
        bool placed = false;
        for (std::size_t fi = 0; fi < stack.floors.size() && !placed; ++fi) {
            FloorState& st = states[fi];
            if (st.remaining < room.modules) continue;
            std::vector<std::size_t> block = pack(room.modules, st, stack.floors[fi].cells);
            if (block.empty()) continue;
            for (std::size_t c : block) st.used[c] = 1;
            st.remaining -= room.modules;
            stack.floors[fi].allocated.push_back({room, stack.floors[fi].index, std::move(block)});
            placed = true;
        }
        if (!placed) out.unallocated.push_back(room);
    }
    for (FloorPlan& f : stack.floors) {
        if (!f.allocated.empty()) out.floors.push_back(std::move(f));
    }
    return out;
}

}  // namespace medbuild::massing
