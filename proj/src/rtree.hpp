#pragma once

#include <string>
#include <vector>

#include "geometry.hpp"

namespace pforge {

// Guttman R-tree over (envelope, id) entries: fanout 16, min fill 6,
// least-area-enlargement descent with quadratic node splits, and
// sort-tile-recursive bulk loading. Node storage is index-based so the
// whole tree is value-copyable for store snapshots.
class RTree {
public:
    static constexpr int kMaxEntries = 16;
    static constexpr int kMinEntries = 6;

    RTree();

    void insert(const Envelope& env, const std::string& id);
    // exact (envelope, id) match; false when absent
    bool remove(const Envelope& env, const std::string& id);
    // ids whose stored envelope intersects env (closed boundaries)
    std::vector<std::string> query(const Envelope& env) const;
    void bulk_load(std::vector<std::pair<Envelope, std::string>> entries);
    void clear();

    std::size_t size() const { return count_; }

    // walk-the-tree check of fill bounds, envelope containment and uniform
    // leaf depth; throws std::logic_error on any violation
    void validate_structure() const;

private:
    struct Entry {
        Envelope env;
        int child = -1;  // node index (internal) or record slot (leaf)
    };
    struct Node {
        bool leaf = true;
        int parent = -1;
        std::vector<Entry> entries;
    };

    int new_node(bool leaf);
    int new_record(const std::string& id);
    void free_node(int n);
    void free_record(int r);

    Envelope node_cover(int n) const;
    int node_height(int n) const;
    int choose_node(const Envelope& env, int target_height) const;
    void insert_entry(int node, const Entry& entry, bool leaf_level);
    void split_node(int n);
    void adjust_upward(int n);
    bool find_leaf(int n, const Envelope& env, const std::string& id, int& leaf,
                   std::size_t& slot) const;
    void condense(int leaf);
    void reinsert_subtree(const Entry& entry, int height);

    void validate_node(int n, int depth, int& leaf_depth, std::size_t& seen) const;

    std::vector<Node> nodes_;
    std::vector<std::string> records_;
    std::vector<int> free_nodes_;
    std::vector<int> free_records_;
    int root_ = 0;
    std::size_t count_ = 0;
};

}  // namespace pforge
