#include <algorithm>
#include <cmath>
#include <deque>
#include <fstream>
#include <numeric>
#include <sstream>

#include "spx/error.hpp"
#include "spx/raster_io.hpp"
#include "spx/superpixel.hpp"
#include "superpixel_internal.hpp"

namespace spx {

using detail::kDx;
using detail::kDy;

int SuperpixelParams::resolved_min_size(int64_t valid_area) const {
    if (min_size > 0) return min_size;
    const int64_t auto_size = valid_area / (4 * static_cast<int64_t>(std::max(1, k_target)));
    return static_cast<int>(std::max<int64_t>(1, auto_size));
}

void Segmentation::validate(const Mask& m) const {
    if (width != m.width || height != m.height)
        throw Error("segmentation: dimensions do not match mask");
    if (labels.size() != static_cast<size_t>(width) * height)
        throw Error("segmentation: label count mismatch");
    if (k_actual == 0) throw Error("segmentation: no segments");

    std::vector<int64_t> sizes(k_actual, 0);
    for (size_t i = 0; i < labels.size(); ++i) {
        const bool valid = m.valid[i] != 0;
        if (!valid) {
            if (labels[i] != kInvalidSegment)
                throw Error("segmentation: masked-out pixel " + std::to_string(i) + " has a label");
            continue;
        }
        if (labels[i] == kInvalidSegment)
            throw Error("segmentation: valid pixel " + std::to_string(i) + " is unlabeled");
        if (labels[i] >= k_actual)
            throw Error("segmentation: label " + std::to_string(labels[i]) + " out of range");
        ++sizes[labels[i]];
    }
    for (uint32_t s = 0; s < k_actual; ++s)
        if (sizes[s] == 0) throw Error("segmentation: empty segment id " + std::to_string(s));

    // 4-connectivity: one flood fill per segment from its first pixel.
    std::vector<int64_t> first(k_actual, -1);
    for (int64_t i = 0; i < static_cast<int64_t>(labels.size()); ++i)
        if (m.valid[i] && first[labels[i]] < 0) first[labels[i]] = i;
    std::vector<uint8_t> seen(labels.size(), 0);
    std::vector<int64_t> stack;
    for (uint32_t s = 0; s < k_actual; ++s) {
        int64_t reached = 0;
        stack.assign(1, first[s]);
        seen[first[s]] = 1;
        while (!stack.empty()) {
            const int64_t i = stack.back();
            stack.pop_back();
            ++reached;
            const int x = static_cast<int>(i % width), y = static_cast<int>(i / width);
            for (int d = 0; d < 4; ++d) {
                const int nx = x + kDx[d], ny = y + kDy[d];
                if (nx < 0 || ny < 0 || nx >= width || ny >= height) continue;
                const int64_t ni = static_cast<int64_t>(ny) * width + nx;
                if (!seen[ni] && m.valid[ni] && labels[ni] == s) {
                    seen[ni] = 1;
                    stack.push_back(ni);
                }
            }
        }
        if (reached != sizes[s])
            throw Error("segmentation: segment " + std::to_string(s) + " is disconnected (" +
                        std::to_string(reached) + " of " + std::to_string(sizes[s]) + " reachable)");
    }
}

namespace detail {

void check_superpixel_inputs(const GrayImage& g, const Mask& m, const SuperpixelParams& p) {
    m.validate();
    if (g.width != m.width || g.height != m.height)
        throw Error("superpixel: image and mask dimensions differ");
    if (g.values.size() != static_cast<size_t>(g.width) * g.height)
        throw Error("superpixel: image value count mismatch");
    if (p.k_target < 1) throw Error("superpixel: k_target must be >= 1");
    if (p.iterations < 1) throw Error("superpixel: iterations must be >= 1");
    if (p.compactness < 0) throw Error("superpixel: compactness must be >= 0");
    const int64_t nvalid = m.valid_count();
    if (p.k_target > nvalid)
        throw Error("superpixel: k_target " + std::to_string(p.k_target) + " exceeds " +
                    std::to_string(nvalid) + " valid pixels");
}

GridShape grid_shape(const Mask& m, int k) {
    GridShape s;
    int x0 = m.width, y0 = m.height, x1 = -1, y1 = -1;
    for (int y = 0; y < m.height; ++y)
        for (int x = 0; x < m.width; ++x)
            if (m.at(x, y)) {
                x0 = std::min(x0, x);
                y0 = std::min(y0, y);
                x1 = std::max(x1, x);
                y1 = std::max(y1, y);
            }
    s.x0 = x0;
    s.y0 = y0;
    s.bw = x1 - x0 + 1;
    s.bh = y1 - y0 + 1;
    const double step = std::sqrt(static_cast<double>(m.valid_count()) / k);
    s.ny = std::clamp(static_cast<int>(std::llround(s.bh / step)), 1, s.bh);
    s.nx = std::clamp(static_cast<int>(std::llround(static_cast<double>(k) / s.ny)), 1, s.bw);
    return s;
}

Segmentation finalize_segmentation(std::vector<uint32_t> labels, const Mask& m, int min_size) {
    const int w = m.width, h = m.height;

    // Multi-source BFS from labeled valid pixels; FIFO order makes the
    // assignment deterministic.
    std::deque<int64_t> queue;
    for (int64_t i = 0; i < static_cast<int64_t>(labels.size()); ++i) {
        if (!m.valid[i]) {
            labels[i] = kInvalidSegment;
            continue;
        }
        if (labels[i] != kInvalidSegment) queue.push_back(i);
    }
    while (!queue.empty()) {
        const int64_t i = queue.front();
        queue.pop_front();
        const int x = static_cast<int>(i % w), y = static_cast<int>(i / w);
        for (int d = 0; d < 4; ++d) {
            const int nx = x + kDx[d], ny = y + kDy[d];
            if (nx < 0 || ny < 0 || nx >= w || ny >= h) continue;
            const int64_t ni = static_cast<int64_t>(ny) * w + nx;
            if (m.valid[ni] && labels[ni] == kInvalidSegment) {
                labels[ni] = labels[i];
                queue.push_back(ni);
            }
        }
    }
    // Isolated mask components no seed reached: each becomes a fresh label.
    uint32_t next = 0;
    for (const uint32_t l : labels)
        if (l != kInvalidSegment) next = std::max(next, l + 1);
    for (int64_t i = 0; i < static_cast<int64_t>(labels.size()); ++i) {
        if (!m.valid[i] || labels[i] != kInvalidSegment) continue;
        const uint32_t fresh = next++;
        labels[i] = fresh;
        std::vector<int64_t> stack{i};
        while (!stack.empty()) {
            const int64_t j = stack.back();
            stack.pop_back();
            const int x = static_cast<int>(j % w), y = static_cast<int>(j / w);
            for (int d = 0; d < 4; ++d) {
                const int nx = x + kDx[d], ny = y + kDy[d];
                if (nx < 0 || ny < 0 || nx >= w || ny >= h) continue;
                const int64_t nj = static_cast<int64_t>(ny) * w + nx;
                if (m.valid[nj] && labels[nj] == kInvalidSegment) {
                    labels[nj] = fresh;
                    stack.push_back(nj);
                }
            }
        }
    }

    Segmentation raw;
    raw.width = w;
    raw.height = h;
    raw.labels = std::move(labels);
    raw.k_actual = next;  // upper bound; enforce_connectivity renumbers
    return enforce_connectivity(raw, min_size);
}

}  // namespace detail

Segmentation enforce_connectivity(const Segmentation& s, int min_size) {
    const int w = s.width, h = s.height;
    const int64_t n = static_cast<int64_t>(w) * h;
    if (s.labels.size() != static_cast<size_t>(n))
        throw Error("enforce_connectivity: label count mismatch");

    // Connected components of equal input label, discovered row-major.
    std::vector<int32_t> comp(n, -1);
    std::vector<int64_t> comp_size;
    std::vector<int64_t> comp_first;
    std::vector<int64_t> stack;
    for (int64_t i = 0; i < n; ++i) {
        if (s.labels[i] == kInvalidSegment || comp[i] >= 0) continue;
        const auto c = static_cast<int32_t>(comp_size.size());
        comp_size.push_back(0);
        comp_first.push_back(i);
        comp[i] = c;
        stack.assign(1, i);
        while (!stack.empty()) {
            const int64_t j = stack.back();
            stack.pop_back();
            ++comp_size[c];
            const int x = static_cast<int>(j % w), y = static_cast<int>(j / w);
            for (int d = 0; d < 4; ++d) {
                const int nx = x + kDx[d], ny = y + kDy[d];
                if (nx < 0 || ny < 0 || nx >= w || ny >= h) continue;
                const int64_t nj = static_cast<int64_t>(ny) * w + nx;
                if (comp[nj] < 0 && s.labels[nj] == s.labels[i]) {
                    comp[nj] = c;
                    stack.push_back(nj);
                }
            }
        }
    }
    const auto ncomp = static_cast<int32_t>(comp_size.size());
    if (ncomp == 0) throw Error("enforce_connectivity: no labeled pixels");

    // Union-find over components; small ones attach to the currently largest
    // adjacent union (ties: smaller representative id).
    std::vector<int32_t> parent(ncomp);
    std::iota(parent.begin(), parent.end(), 0);
    std::vector<int64_t> union_size = comp_size;
    auto find = [&](int32_t c) {
        while (parent[c] != c) {
            parent[c] = parent[parent[c]];
            c = parent[c];
        }
        return c;
    };

    std::vector<std::vector<int32_t>> adj(ncomp);
    for (int64_t i = 0; i < n; ++i) {
        if (comp[i] < 0) continue;
        const int x = static_cast<int>(i % w), y = static_cast<int>(i / w);
        // right and down neighbors cover each adjacent pair once
        for (const auto [nx, ny] : {std::pair{x + 1, y}, std::pair{x, y + 1}}) {
            if (nx >= w || ny >= h) continue;
            const int64_t ni = static_cast<int64_t>(ny) * w + nx;
            if (comp[ni] < 0 || comp[ni] == comp[i]) continue;
            adj[comp[i]].push_back(comp[ni]);
            adj[comp[ni]].push_back(comp[i]);
        }
    }

    for (int32_t c = 0; c < ncomp; ++c) {
        if (comp_size[c] >= min_size) continue;
        const int32_t rc = find(c);
        int32_t best = -1;
        int64_t best_size = -1;
        for (const int32_t a : adj[c]) {
            const int32_t ra = find(a);
            if (ra == rc) continue;
            if (union_size[ra] > best_size || (union_size[ra] == best_size && ra < best)) {
                best = ra;
                best_size = union_size[ra];
            }
        }
        if (best < 0) continue;  // isolated island keeps its own segment
        parent[rc] = best;
        union_size[best] += union_size[rc];
    }

    // Renumber by first row-major occurrence of each surviving union.
    Segmentation out;
    out.width = w;
    out.height = h;
    out.labels.assign(static_cast<size_t>(n), kInvalidSegment);
    std::vector<uint32_t> new_id(ncomp, kInvalidSegment);
    uint32_t next = 0;
    for (int64_t i = 0; i < n; ++i) {
        if (comp[i] < 0) continue;
        const int32_t r = find(comp[i]);
        if (new_id[r] == kInvalidSegment) new_id[r] = next++;
        out.labels[i] = new_id[r];
    }
    out.k_actual = next;
    return out;
}

std::vector<int64_t> grid_seeds(const Mask& m, int k) {
    m.validate();
    const int64_t nvalid = m.valid_count();
    if (k < 1 || k > nvalid)
        throw Error("grid_seeds: k must be in [1, valid pixel count]");
    const int w = m.width;
    const detail::GridShape gs = detail::grid_shape(m, k);

    const int ncells = gs.nx * gs.ny;
    struct Cell {
        std::vector<int64_t> pixels;   // row-major within the cell
        std::vector<int64_t> sites;    // chosen seeds
        int64_t weight = 0;
        double cx = 0, cy = 0;
    };
    std::vector<Cell> cells(ncells);
    auto cell_of = [&](int x, int y) {
        const int ci = std::min(gs.nx - 1, (x - gs.x0) * gs.nx / gs.bw);
        const int cj = std::min(gs.ny - 1, (y - gs.y0) * gs.ny / gs.bh);
        return cj * gs.nx + ci;
    };
    for (int c = 0; c < ncells; ++c) {
        const int ci = c % gs.nx, cj = c / gs.nx;
        cells[c].cx = gs.x0 + (ci + 0.5) * gs.bw / gs.nx;
        cells[c].cy = gs.y0 + (cj + 0.5) * gs.bh / gs.ny;
    }
    for (int y = 0; y < m.height; ++y)
        for (int x = 0; x < w; ++x)
            if (m.at(x, y)) {
                Cell& cell = cells[cell_of(x, y)];
                cell.pixels.push_back(static_cast<int64_t>(y) * w + x);
                ++cell.weight;
            }

    // One site per populated cell: the valid pixel nearest the cell center.
    int placed = 0;
    for (auto& cell : cells) {
        if (cell.pixels.empty()) continue;
        int64_t best = -1;
        double best_d = 0;
        for (const int64_t i : cell.pixels) {
            const double dx = static_cast<double>(i % w) - cell.cx;
            const double dy = static_cast<double>(i / w) - cell.cy;
            const double d = dx * dx + dy * dy;
            if (best < 0 || d < best_d) {
                best = i;
                best_d = d;
            }
        }
        cell.sites.push_back(best);
        ++placed;
    }

    // Trim to k by dropping sites of the lightest cells first.
    if (placed > k) {
        std::vector<int> order;
        for (int c = 0; c < ncells; ++c)
            if (!cells[c].sites.empty()) order.push_back(c);
        std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
            if (cells[a].weight != cells[b].weight) return cells[a].weight < cells[b].weight;
            return a < b;
        });
        for (int i = 0; placed > k; ++i, --placed) cells[order[i]].sites.clear();
    }

    // Densify to k: round-robin over cells by weight, adding the unused valid
    // pixel farthest from the cell's existing sites.
    while (placed < k) {
        std::vector<int> order;
        for (int c = 0; c < ncells; ++c)
            if (static_cast<int64_t>(cells[c].sites.size()) < cells[c].weight) order.push_back(c);
        std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
            const int64_t fa = cells[a].weight - static_cast<int64_t>(cells[a].sites.size());
            const int64_t fb = cells[b].weight - static_cast<int64_t>(cells[b].sites.size());
            if (fa != fb) return fa > fb;
            return a < b;
        });
        bool progress = false;
        for (const int c : order) {
            if (placed >= k) break;
            Cell& cell = cells[c];
            int64_t best = -1;
            double best_d = -1;
            for (const int64_t i : cell.pixels) {
                if (std::find(cell.sites.begin(), cell.sites.end(), i) != cell.sites.end()) continue;
                double d = std::numeric_limits<double>::infinity();
                for (const int64_t sIdx : cell.sites) {
                    const double dx = static_cast<double>(i % w) - static_cast<double>(sIdx % w);
                    const double dy = static_cast<double>(i / w) - static_cast<double>(sIdx / w);
                    d = std::min(d, dx * dx + dy * dy);
                }
                if (cell.sites.empty()) d = 0;
                if (d > best_d) {
                    best = i;
                    best_d = d;
                }
            }
            if (best >= 0) {
                cell.sites.push_back(best);
                ++placed;
                progress = true;
            }
        }
        if (!progress) break;  // cannot happen when k <= valid count
    }

    std::vector<int64_t> seeds;
    seeds.reserve(k);
    for (const auto& cell : cells)
        for (const int64_t s : cell.sites) seeds.push_back(s);
    std::sort(seeds.begin(), seeds.end());
    return seeds;
}

std::vector<uint32_t> initial_grid_partition(const Mask& m, int k) {
    const int w = m.width, h = m.height;
    const int64_t n = static_cast<int64_t>(w) * h;
    const detail::GridShape gs = detail::grid_shape(m, k);

    std::vector<uint32_t> labels(n, kInvalidSegment);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
            if (!m.at(x, y)) continue;
            const int ci = std::min(gs.nx - 1, (x - gs.x0) * gs.nx / gs.bw);
            const int cj = std::min(gs.ny - 1, (y - gs.y0) * gs.ny / gs.bh);
            labels[static_cast<int64_t>(y) * w + x] = static_cast<uint32_t>(cj * gs.nx + ci);
        }

    // Split cells into connected components so the working partition starts
    // valid, then normalize the count to exactly k.
    Segmentation tmp;
    tmp.width = w;
    tmp.height = h;
    tmp.labels = std::move(labels);
    tmp.k_actual = static_cast<uint32_t>(gs.nx * gs.ny);
    tmp = enforce_connectivity(tmp, 1);  // pure component split + renumber

    auto count_segments = [&]() { return tmp.k_actual; };

    // Too many: merge the smallest segment into its smallest adjacent
    // neighbor until the count matches.
    while (count_segments() > static_cast<uint32_t>(k)) {
        std::vector<int64_t> sizes(tmp.k_actual, 0);
        for (const uint32_t l : tmp.labels)
            if (l != kInvalidSegment) ++sizes[l];
        uint32_t victim = 0;
        for (uint32_t s = 1; s < tmp.k_actual; ++s)
            if (sizes[s] < sizes[victim]) victim = s;
        // merge into the adjacent segment with the smallest size (evens areas)
        uint32_t target = kInvalidSegment;
        for (int64_t i = 0; i < n; ++i) {
            if (tmp.labels[i] != victim) continue;
            const int x = static_cast<int>(i % w), y = static_cast<int>(i / w);
            for (int d = 0; d < 4; ++d) {
                const int nx2 = x + kDx[d], ny2 = y + kDy[d];
                if (nx2 < 0 || ny2 < 0 || nx2 >= w || ny2 >= h) continue;
                const uint32_t l = tmp.labels[static_cast<int64_t>(ny2) * w + nx2];
                if (l == kInvalidSegment || l == victim) continue;
                if (target == kInvalidSegment || sizes[l] < sizes[target] ||
                    (sizes[l] == sizes[target] && l < target))
                    target = l;
            }
        }
        if (target == kInvalidSegment) break;  // isolated; give up on exact k
        for (auto& l : tmp.labels)
            if (l == victim) l = target;
        tmp = enforce_connectivity(tmp, 1);
    }

    // Too few: split the largest segment across its longer axis at the
    // median pixel.
    while (count_segments() < static_cast<uint32_t>(k)) {
        std::vector<int64_t> sizes(tmp.k_actual, 0);
        for (const uint32_t l : tmp.labels)
            if (l != kInvalidSegment) ++sizes[l];
        uint32_t big = 0;
        for (uint32_t s = 1; s < tmp.k_actual; ++s)
            if (sizes[s] > sizes[big]) big = s;
        if (sizes[big] < 2) break;
        std::vector<int64_t> px;
        int minx = w, maxx = -1, miny = h, maxy = -1;
        for (int64_t i = 0; i < n; ++i)
            if (tmp.labels[i] == big) {
                px.push_back(i);
                const int x = static_cast<int>(i % w), y = static_cast<int>(i / w);
                minx = std::min(minx, x);
                maxx = std::max(maxx, x);
                miny = std::min(miny, y);
                maxy = std::max(maxy, y);
            }
        const bool split_x = (maxx - minx) >= (maxy - miny);
        std::stable_sort(px.begin(), px.end(), [&](int64_t a, int64_t b) {
            const int ka = split_x ? static_cast<int>(a % w) : static_cast<int>(a / w);
            const int kb = split_x ? static_cast<int>(b % w) : static_cast<int>(b / w);
            return ka < kb;
        });
        const uint32_t fresh = tmp.k_actual;
        for (size_t i = px.size() / 2; i < px.size(); ++i) tmp.labels[px[i]] = fresh;
        tmp.k_actual = fresh + 1;
        tmp = enforce_connectivity(tmp, 1);
    }

    return tmp.labels;
}

double boundary_recall(const Segmentation& s, const LabelMap& truth, int tol) {
    if (s.width != truth.width || s.height != truth.height)
        throw Error("boundary_recall: dimensions differ");
    const int w = s.width, h = s.height;
    auto is_valid = [&](int x, int y) { return truth.at(x, y) != kLabelInvalid; };

    auto boundary = [&](auto value_at) {
        std::vector<uint8_t> b(static_cast<size_t>(w) * h, 0);
        for (int y = 0; y < h; ++y)
            for (int x = 0; x < w; ++x) {
                if (!is_valid(x, y)) continue;
                for (int d = 0; d < 4; ++d) {
                    const int nx = x + kDx[d], ny = y + kDy[d];
                    if (nx < 0 || ny < 0 || nx >= w || ny >= h || !is_valid(nx, ny)) continue;
                    if (value_at(nx, ny) != value_at(x, y)) {
                        b[static_cast<size_t>(y) * w + x] = 1;
                        break;
                    }
                }
            }
        return b;
    };
    const auto gt = boundary([&](int x, int y) { return truth.at(x, y); });
    const auto pred = boundary([&](int x, int y) { return s.at(x, y); });

    int64_t total = 0, hit = 0;
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
            if (!gt[static_cast<size_t>(y) * w + x]) continue;
            ++total;
            bool found = false;
            for (int dy = -tol; dy <= tol && !found; ++dy)
                for (int dx = -tol; dx <= tol && !found; ++dx) {
                    const int nx = x + dx, ny = y + dy;
                    if (nx < 0 || ny < 0 || nx >= w || ny >= h) continue;
                    if (pred[static_cast<size_t>(ny) * w + nx]) found = true;
                }
            hit += found;
        }
    return total == 0 ? 1.0 : static_cast<double>(hit) / static_cast<double>(total);
}

void save_segmentation(const std::string& header_path, const Segmentation& s) {
    save_u32_grid(header_path, s.width, s.height, s.labels);
}

Segmentation load_segmentation(const std::string& header_path) {
    Segmentation s;
    s.labels = load_u32_grid(header_path, s.width, s.height);
    uint32_t maxl = 0;
    for (const uint32_t l : s.labels)
        if (l != kInvalidSegment) maxl = std::max(maxl, l + 1);
    s.k_actual = maxl;
    return s;
}

void write_sidecar(const std::string& path, const SegmentationSidecar& sc) {
    std::ostringstream out;
    out << "algorithm=" << sc.algorithm << "\n"
        << "k_target=" << sc.params.k_target << "\n"
        << "compactness=" << sc.params.compactness << "\n"
        << "iterations=" << sc.params.iterations << "\n"
        << "seed=" << sc.params.seed << "\n"
        << "min_size=" << sc.params.min_size << "\n"
        << "k_actual=" << sc.k_actual << "\n"
        << "variant=" << sc.variant << "\n"
        << "wall_ms=" << sc.wall_ms << "\n";
    std::ofstream f(path, std::ios::trunc);
    if (!f) throw Error("cannot write sidecar: " + path);
    f << out.str();
}

SegmentationSidecar read_sidecar(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw Error("cannot open sidecar: " + path);
    SegmentationSidecar sc;
    std::string line;
    while (std::getline(f, line)) {
        const auto eq = line.find('=');
        if (eq == std::string::npos) continue;
        const std::string key = line.substr(0, eq), value = line.substr(eq + 1);
        if (key == "algorithm") sc.algorithm = value;
        else if (key == "k_target") sc.params.k_target = std::stoi(value);
        else if (key == "compactness") sc.params.compactness = std::stod(value);
        else if (key == "iterations") sc.params.iterations = std::stoi(value);
        else if (key == "seed") sc.params.seed = std::stoull(value);
        else if (key == "min_size") sc.params.min_size = std::stoi(value);
        else if (key == "k_actual") sc.k_actual = static_cast<uint32_t>(std::stoul(value));
        else if (key == "variant") sc.variant = value;
        else if (key == "wall_ms") sc.wall_ms = std::stod(value);
    }
    return sc;
}

const std::vector<std::string>& superpixel_methods() {
    static const std::vector<std::string> methods{"crs", "ergc", "etps", "rss", "slic"};
    return methods;
}

Segmentation run_superpixel(const std::string& method, const GrayImage& g, const Mask& m,
                            const SuperpixelParams& p) {
    if (method == "slic") return slic(g, m, p);
    if (method == "ergc") return ergc(g, m, p);
    if (method == "etps") return etps(g, m, p);
    if (method == "rss") return rss(g, m, p);
    if (method == "crs") return crs(g, m, p);
    throw UsageError("unknown superpixel method: " + method);
}

std::string superpixel_variant_note(const std::string& method) {
    if (method == "slic")
        return "single-band masked variant; d = |dI| + (compactness/S)*||dxy||";
    if (method == "ergc")
        return "single-band variant; arrival accumulates |I-mean(region)| + (compactness/S)*dist(seed)";
    if (method == "etps")
        return "single-band variant; E = intensity scatter + compactness*boundary length, coarse-to-fine block moves";
    if (method == "rss")
        return "single-band variant; path cost = compactness*max|dI| + intensity range, (cost,hops,root) order";
    if (method == "crs")
        return "single-band variant; Gaussian log-likelihood (variance floor 1e-6) - compactness*boundary length";
    throw UsageError("unknown superpixel method: " + method);
}

}  // namespace spx
