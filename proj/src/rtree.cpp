#include "rtree.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace pforge {

namespace {

Envelope cover(const Envelope& a, const Envelope& b) {
    Envelope e = a;
    e.expand(b);
    return e;
}

double enlargement(const Envelope& e, const Envelope& add) {
    return cover(e, add).area() - e.area();
}

}  // namespace

RTree::RTree() {
    root_ = new_node(true);
}

int RTree::new_node(bool leaf) {
    if (!free_nodes_.empty()) {
        const int n = free_nodes_.back();
        free_nodes_.pop_back();
        nodes_[n] = Node{leaf, -1, {}};
        return n;
    }
    nodes_.push_back(Node{leaf, -1, {}});
    return static_cast<int>(nodes_.size()) - 1;
}

int RTree::new_record(const std::string& id) {
    if (!free_records_.empty()) {
        const int r = free_records_.back();
        free_records_.pop_back();
        records_[r] = id;
        return r;
    }
    records_.push_back(id);
    return static_cast<int>(records_.size()) - 1;
}

void RTree::free_node(int n) {
    nodes_[n].entries.clear();
    free_nodes_.push_back(n);
}

void RTree::free_record(int r) {
    records_[r].clear();
    free_records_.push_back(r);
}

Envelope RTree::node_cover(int n) const {
    const Node& node = nodes_[n];
    if (node.entries.empty()) return Envelope{0, 0, 0, 0};
    Envelope e = node.entries[0].env;
    for (std::size_t i = 1; i < node.entries.size(); ++i) e.expand(node.entries[i].env);
    return e;
}

int RTree::node_height(int n) const {
    int h = 0;
    while (!nodes_[n].leaf) {
        n = nodes_[n].entries.front().child;
        ++h;
    }
    return h;
}

// descend by least area enlargement until the subtree root sits at
// target_height (0 = leaf)
int RTree::choose_node(const Envelope& env, int target_height) const {
    int n = root_;
    int h = node_height(root_);
    while (h > target_height) {
        const Node& node = nodes_[n];
        int best = -1;
        double best_enlarge = std::numeric_limits<double>::infinity();
        double best_area = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < node.entries.size(); ++i) {
            const double grow = enlargement(node.entries[i].env, env);
            const double area = node.entries[i].env.area();
            if (grow < best_enlarge || (grow == best_enlarge && area < best_area)) {
                best_enlarge = grow;
                best_area = area;
                best = static_cast<int>(i);
            }
        }
        n = node.entries[static_cast<std::size_t>(best)].child;
        --h;
    }
    return n;
}

void RTree::insert(const Envelope& env, const std::string& id) {
    Entry entry{env, new_record(id)};
    const int leaf = choose_node(env, 0);
    nodes_[leaf].entries.push_back(entry);
    ++count_;
    if (static_cast<int>(nodes_[leaf].entries.size()) > kMaxEntries)
        split_node(leaf);
    else
        adjust_upward(leaf);
}

void RTree::adjust_upward(int n) {
    // envelope bookkeeping happens lazily through node_cover at query
    // time for parents; nothing cached outside entries, so walk up and
    // refresh each parent entry
    while (nodes_[n].parent >= 0) {
        const int p = nodes_[n].parent;
        for (auto& e : nodes_[p].entries) {
            if (e.child == n) {
                e.env = node_cover(n);
                break;
            }
        }
        n = p;
    }
}

void RTree::split_node(int n) {
    // Guttman quadratic split
    std::vector<Entry> all = std::move(nodes_[n].entries);
    nodes_[n].entries.clear();

    std::size_t seed_a = 0, seed_b = 1;
    double worst = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < all.size(); ++i) {
        for (std::size_t j = i + 1; j < all.size(); ++j) {
            const double dead =
                cover(all[i].env, all[j].env).area() - all[i].env.area() - all[j].env.area();
            if (dead > worst) {
                worst = dead;
                seed_a = i;
                seed_b = j;
            }
        }
    }

    const int other = new_node(nodes_[n].leaf);
    std::vector<Entry> group_a{all[seed_a]};
    std::vector<Entry> group_b{all[seed_b]};
    Envelope cover_a = all[seed_a].env;
    Envelope cover_b = all[seed_b].env;
    std::vector<Entry> rest;
    for (std::size_t i = 0; i < all.size(); ++i)
        if (i != seed_a && i != seed_b) rest.push_back(all[i]);

    while (!rest.empty()) {
        const std::size_t remaining = rest.size();
        if (group_a.size() + remaining == kMinEntries) {
            for (const auto& e : rest) {
                cover_a = cover(cover_a, e.env);
                group_a.push_back(e);
            }
            rest.clear();
            break;
        }
        if (group_b.size() + remaining == kMinEntries) {
            for (const auto& e : rest) {
                cover_b = cover(cover_b, e.env);
                group_b.push_back(e);
            }
            rest.clear();
            break;
        }
        // pick the entry with the strongest group preference
        std::size_t pick = 0;
        double best_diff = -1.0;
        double grow_a_pick = 0.0, grow_b_pick = 0.0;
        for (std::size_t i = 0; i < rest.size(); ++i) {
            const double ga = cover(cover_a, rest[i].env).area() - cover_a.area();
            const double gb = cover(cover_b, rest[i].env).area() - cover_b.area();
            const double diff = std::fabs(ga - gb);
            if (diff > best_diff) {
                best_diff = diff;
                pick = i;
                grow_a_pick = ga;
                grow_b_pick = gb;
            }
        }
        const Entry e = rest[pick];
        rest.erase(rest.begin() + static_cast<std::ptrdiff_t>(pick));
        bool to_a;
        if (grow_a_pick != grow_b_pick) {
            to_a = grow_a_pick < grow_b_pick;
        } else if (cover_a.area() != cover_b.area()) {
            to_a = cover_a.area() < cover_b.area();
        } else {
            to_a = group_a.size() <= group_b.size();
        }
        if (to_a) {
            cover_a = cover(cover_a, e.env);
            group_a.push_back(e);
        } else {
            cover_b = cover(cover_b, e.env);
            group_b.push_back(e);
        }
    }

    nodes_[n].entries = std::move(group_a);
    nodes_[other].entries = std::move(group_b);
    if (!nodes_[other].leaf)
        for (const auto& e : nodes_[other].entries) nodes_[e.child].parent = other;

    if (n == root_) {
        const int new_root = new_node(false);
        nodes_[new_root].entries.push_back({node_cover(n), n});
        nodes_[new_root].entries.push_back({node_cover(other), other});
        nodes_[n].parent = new_root;
        nodes_[other].parent = new_root;
        root_ = new_root;
        return;
    }

    const int parent = nodes_[n].parent;
    nodes_[other].parent = parent;
    for (auto& e : nodes_[parent].entries) {
        if (e.child == n) {
            e.env = node_cover(n);
            break;
        }
    }
    nodes_[parent].entries.push_back({node_cover(other), other});
    if (static_cast<int>(nodes_[parent].entries.size()) > kMaxEntries)
        split_node(parent);
    else
        adjust_upward(parent);
}

std::vector<std::string> RTree::query(const Envelope& env) const {
    std::vector<std::string> out;
    std::vector<int> stack{root_};
    while (!stack.empty()) {
        const int n = stack.back();
        stack.pop_back();
        const Node& node = nodes_[n];
        for (const auto& e : node.entries) {
            if (!e.env.intersects(env)) continue;
            if (node.leaf)
                out.push_back(records_[e.child]);
            else
                stack.push_back(e.child);
        }
    }
    return out;
}

bool RTree::find_leaf(int n, const Envelope& env, const std::string& id, int& leaf,
                      std::size_t& slot) const {
    const Node& node = nodes_[n];
    for (std::size_t i = 0; i < node.entries.size(); ++i) {
        const Entry& e = node.entries[i];
        if (node.leaf) {
            if (e.env == env && records_[e.child] == id) {
                leaf = n;
                slot = i;
                return true;
            }
        } else if (e.env.contains(env)) {
            if (find_leaf(e.child, env, id, leaf, slot)) return true;
        }
    }
    return false;
}

bool RTree::remove(const Envelope& env, const std::string& id) {
    int leaf = -1;
    std::size_t slot = 0;
    if (!find_leaf(root_, env, id, leaf, slot)) return false;
    free_record(nodes_[leaf].entries[slot].child);
    nodes_[leaf].entries.erase(nodes_[leaf].entries.begin() +
                               static_cast<std::ptrdiff_t>(slot));
    --count_;
    condense(leaf);
    return true;
}

void RTree::reinsert_subtree(const Entry& entry, int height) {
    if (node_height(root_) < height + 1) {
        // tree shrank below the subtree level; dismantle and reinsert leaves
        std::vector<int> stack{entry.child};
        while (!stack.empty()) {
            const int n = stack.back();
            stack.pop_back();
            for (const auto& e : nodes_[n].entries) {
                if (nodes_[n].leaf) {
                    const int leaf = choose_node(e.env, 0);
                    nodes_[leaf].entries.push_back(e);
                    if (static_cast<int>(nodes_[leaf].entries.size()) > kMaxEntries)
                        split_node(leaf);
                    else
                        adjust_upward(leaf);
                } else {
                    stack.push_back(e.child);
                }
            }
            free_node(n);
        }
        return;
    }
    const int target = choose_node(entry.env, height + 1);
    nodes_[target].entries.push_back(entry);
    nodes_[entry.child].parent = target;
    if (static_cast<int>(nodes_[target].entries.size()) > kMaxEntries)
        split_node(target);
    else
        adjust_upward(target);
}

void RTree::condense(int n) {
    // collect orphaned subtrees bottom-up, then reinsert
    std::vector<std::pair<Entry, int>> orphans;  // entry + subtree height
    std::vector<std::string> orphan_ids;
    std::vector<Envelope> orphan_envs;

    while (n != root_) {
        const int parent = nodes_[n].parent;
        if (static_cast<int>(nodes_[n].entries.size()) < kMinEntries) {
            for (auto& e : nodes_[parent].entries) {
                if (e.child == n) {
                    e = nodes_[parent].entries.back();
                    nodes_[parent].entries.pop_back();
                    break;
                }
            }
            if (nodes_[n].leaf) {
                for (const auto& e : nodes_[n].entries) {
                    orphan_envs.push_back(e.env);
                    orphan_ids.push_back(records_[e.child]);
                    free_record(e.child);
                }
            } else {
                const int h = node_height(n) - 1;
                for (const auto& e : nodes_[n].entries) orphans.push_back({e, h});
            }
            free_node(n);
        } else {
            for (auto& e : nodes_[parent].entries) {
                if (e.child == n) {
                    e.env = node_cover(n);
                    break;
                }
            }
        }
        n = parent;
    }

    // shrink the root while it is an internal node with one child
    while (!nodes_[root_].leaf && nodes_[root_].entries.size() == 1) {
        const int child = nodes_[root_].entries.front().child;
        free_node(root_);
        nodes_[child].parent = -1;
        root_ = child;
    }
    if (!nodes_[root_].leaf && nodes_[root_].entries.empty()) {
        // cannot happen via public ops, keep the tree sane anyway
        nodes_[root_].leaf = true;
    }

    for (const auto& [entry, height] : orphans) reinsert_subtree(entry, height);
    for (std::size_t i = 0; i < orphan_ids.size(); ++i) {
        Entry entry{orphan_envs[i], new_record(orphan_ids[i])};
        const int leaf = choose_node(entry.env, 0);
        nodes_[leaf].entries.push_back(entry);
        if (static_cast<int>(nodes_[leaf].entries.size()) > kMaxEntries)
            split_node(leaf);
        else
            adjust_upward(leaf);
    }
}

void RTree::bulk_load(std::vector<std::pair<Envelope, std::string>> entries) {
    clear();
    count_ = entries.size();
    if (entries.empty()) return;

    // even group sizes so every node lands in [min, max] fill
    auto group_sizes = [](std::size_t n, std::size_t cap) {
        const std::size_t groups = (n + cap - 1) / cap;
        const std::size_t base = n / groups;
        const std::size_t extra = n % groups;
        std::vector<std::size_t> sizes(groups, base);
        for (std::size_t i = 0; i < extra; ++i) ++sizes[i];
        return sizes;
    };

    // sort-tile-recursive leaf packing
    std::sort(entries.begin(), entries.end(), [](const auto& a, const auto& b) {
        const double ax = a.first.min_x + a.first.max_x;
        const double bx = b.first.min_x + b.first.max_x;
        if (ax != bx) return ax < bx;
        return a.second < b.second;
    });
    const std::size_t n = entries.size();
    const std::size_t leaf_count = (n + kMaxEntries - 1) / kMaxEntries;
    const std::size_t slice_count =
        static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(leaf_count))));
    const auto slice_sizes = group_sizes(n, (n + slice_count - 1) / slice_count);

    std::vector<int> level_nodes;
    std::size_t at = 0;
    for (const std::size_t slice : slice_sizes) {
        auto begin = entries.begin() + static_cast<std::ptrdiff_t>(at);
        auto end = begin + static_cast<std::ptrdiff_t>(slice);
        std::sort(begin, end, [](const auto& a, const auto& b) {
            const double ay = a.first.min_y + a.first.max_y;
            const double by = b.first.min_y + b.first.max_y;
            if (ay != by) return ay < by;
            return a.second < b.second;
        });
        std::size_t off = 0;
        for (const std::size_t sz : group_sizes(slice, kMaxEntries)) {
            const int leaf = new_node(true);
            for (std::size_t i = 0; i < sz; ++i) {
                const auto& [env, id] = *(begin + static_cast<std::ptrdiff_t>(off + i));
                nodes_[leaf].entries.push_back({env, new_record(id)});
            }
            level_nodes.push_back(leaf);
            off += sz;
        }
        at += slice;
    }

    // build internal levels over node centers
    while (level_nodes.size() > 1) {
        std::vector<std::pair<Envelope, int>> items;
        items.reserve(level_nodes.size());
        for (int idx : level_nodes) items.push_back({node_cover(idx), idx});
        std::sort(items.begin(), items.end(), [](const auto& a, const auto& b) {
            const double ax = a.first.min_x + a.first.max_x;
            const double bx = b.first.min_x + b.first.max_x;
            if (ax != bx) return ax < bx;
            return a.second < b.second;
        });
        const std::size_t parents = (items.size() + kMaxEntries - 1) / kMaxEntries;
        const std::size_t slices =
            static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(parents))));
        const auto sizes = group_sizes(items.size(), (items.size() + slices - 1) / slices);
        std::vector<int> next_level;
        std::size_t pos = 0;
        for (const std::size_t slice : sizes) {
            auto begin = items.begin() + static_cast<std::ptrdiff_t>(pos);
            auto end = begin + static_cast<std::ptrdiff_t>(slice);
            std::sort(begin, end, [](const auto& a, const auto& b) {
                const double ay = a.first.min_y + a.first.max_y;
                const double by = b.first.min_y + b.first.max_y;
                if (ay != by) return ay < by;
                return a.second < b.second;
            });
            std::size_t off = 0;
            for (const std::size_t sz : group_sizes(slice, kMaxEntries)) {
                const int parent = new_node(false);
                for (std::size_t i = 0; i < sz; ++i) {
                    const auto& [env, child] = *(begin + static_cast<std::ptrdiff_t>(off + i));
                    nodes_[parent].entries.push_back({env, child});
                    nodes_[child].parent = parent;
                }
                next_level.push_back(parent);
                off += sz;
            }
            pos += slice;
        }
        level_nodes = std::move(next_level);
    }
    root_ = level_nodes.front();
    nodes_[root_].parent = -1;
}

void RTree::clear() {
    nodes_.clear();
    records_.clear();
    free_nodes_.clear();
    free_records_.clear();
    count_ = 0;
    root_ = new_node(true);
}

void RTree::validate_node(int n, int depth, int& leaf_depth, std::size_t& seen) const {
    const Node& node = nodes_[n];
    if (n != root_) {
        if (static_cast<int>(node.entries.size()) < kMinEntries ||
            static_cast<int>(node.entries.size()) > kMaxEntries)
            throw std::logic_error("node fill out of bounds: " +
                                   std::to_string(node.entries.size()));
    } else if (static_cast<int>(node.entries.size()) > kMaxEntries) {
        throw std::logic_error("root overfull");
    }
    if (node.leaf) {
        if (leaf_depth == -1)
            leaf_depth = depth;
        else if (leaf_depth != depth)
            throw std::logic_error("leaves at unequal depth");
        seen += node.entries.size();
        return;
    }
    if (n == root_ && node.entries.size() < 2)
        throw std::logic_error("internal root must have >= 2 children");
    for (const auto& e : node.entries) {
        if (nodes_[e.child].parent != n) throw std::logic_error("broken parent link");
        const Envelope actual = node_cover(e.child);
        if (!e.env.contains(actual))
            throw std::logic_error("parent envelope does not contain child cover");
        validate_node(e.child, depth + 1, leaf_depth, seen);
    }
}

void RTree::validate_structure() const {
    int leaf_depth = -1;
    std::size_t seen = 0;
    validate_node(root_, 0, leaf_depth, seen);
    if (seen != count_)
        throw std::logic_error("entry count mismatch: " + std::to_string(seen) + " vs " +
                               std::to_string(count_));
}

}  // namespace pforge
