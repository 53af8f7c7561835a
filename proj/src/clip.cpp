#include "clip.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <queue>
#include <set>
#include <vector>

// Sweep-line boolean operation over edge subdivisions, following the
// Martinez-Rueda-Feito formulation. Overlapping collinear edges are
// classified via transition types so shared boundaries (including the
// a==b case) resolve exactly.

namespace pforge {

Coord snap_to_grid(const Coord& c) {
    auto snap = [](double v) {
        if (std::fabs(v) > 8.0e6) return v;  // beyond exact 1e-9 grid range
        return std::round(v * 1e9) / 1e9 + 0.0;
    };
    return {snap(c.x), snap(c.y)};
}

namespace {

enum class EdgeType { Normal, NonContributing, SameTransition, DifferentTransition };

enum Operand : unsigned char { kSubject = 0, kClipping = 1 };

struct SweepEvent;

struct SegmentOrder {
    bool operator()(const SweepEvent* le1, const SweepEvent* le2) const;
};

using StatusLine = std::set<SweepEvent*, SegmentOrder>;

// twice the signed area of triangle (a, b, c)
double sarea(const Coord& a, const Coord& b, const Coord& c) {
    return (a.x - c.x) * (b.y - c.y) - (b.x - c.x) * (a.y - c.y);
}

struct SweepEvent {
    Coord p;
    bool left = false;
    SweepEvent* other = nullptr;
    Operand pol = kSubject;
    EdgeType type = EdgeType::Normal;
    bool in_out = false;
    bool other_in_out = false;
    bool in_result = false;
    bool in_status = false;
    std::size_t serial = 0;   // creation order, deterministic tie-break
    std::size_t pos = 0;      // slot in the result-event array
    StatusLine::iterator status_it{};

    bool vertical() const { return p.x == other->p.x; }
    // segment strictly below point x (valid for left events)
    bool below(const Coord& x) const {
        return left ? sarea(p, other->p, x) > 0 : sarea(other->p, p, x) > 0;
    }
    bool above(const Coord& x) const { return !below(x); }
};

// processing order: true when e1 must be processed after e2
struct EventAfter {
    bool operator()(const SweepEvent* e1, const SweepEvent* e2) const {
        if (e1->p.x != e2->p.x) return e1->p.x > e2->p.x;
        if (e1->p.y != e2->p.y) return e1->p.y > e2->p.y;
        if (e1->left != e2->left) return e1->left;  // right endpoints first
        const double area = sarea(e1->p, e1->other->p, e2->other->p);
        if (area != 0.0) return e1->above(e2->other->p);  // bottom segment first
        if (e1->pol != e2->pol) return e1->pol > e2->pol;
        return e1->serial > e2->serial;
    }
};

// vertical order of segments along the sweep line (left events only)
bool SegmentOrder::operator()(const SweepEvent* le1, const SweepEvent* le2) const {
    if (le1 == le2) return false;
    if (sarea(le1->p, le1->other->p, le2->p) != 0.0 ||
        sarea(le1->p, le1->other->p, le2->other->p) != 0.0) {
        // non-collinear; sharing the left endpoint -> sort by right ends
        if (le1->p == le2->p) return le1->below(le2->other->p);
        if (le1->p.x == le2->p.x) return le1->p.y < le2->p.y;
        EventAfter after;
        if (after(le1, le2)) return le2->above(le1->p);  // le2 inserted first
        return le1->below(le2->p);
    }
    if (le1->pol != le2->pol) return le1->pol < le2->pol;
    return le1->serial < le2->serial;
}

// 0 = disjoint, 1 = single point (out0), 2 = collinear overlap [out0, out1]
int find_intersection(const Coord& a0, const Coord& a1, const Coord& b0, const Coord& b1,
                      Coord& out0, Coord& out1) {
    const double d0x = a1.x - a0.x, d0y = a1.y - a0.y;
    const double d1x = b1.x - b0.x, d1y = b1.y - b0.y;
    const double ex = b0.x - a0.x, ey = b0.y - a0.y;
    const double kross = d0x * d1y - d0y * d1x;

    auto snap_endpoint = [&](Coord c) {
        for (const Coord* e : {&a0, &a1, &b0, &b1}) {
            if (coord_near(c, *e)) return *e;
        }
        return c;
    };

    if (kross != 0.0) {
        const double s = (ex * d1y - ey * d1x) / kross;
        if (s < 0.0 || s > 1.0) return 0;
        const double t = (ex * d0y - ey * d0x) / kross;
        if (t < 0.0 || t > 1.0) return 0;
        out0 = snap_endpoint({a0.x + s * d0x, a0.y + s * d0y});
        return 1;
    }

    // parallel: distinct lines never meet
    if (ex * d0y - ey * d0x != 0.0) return 0;

    // collinear: overlap interval in the parameter space of segment a
    const double len2 = d0x * d0x + d0y * d0y;
    if (len2 == 0.0) return 0;
    const double s0 = (ex * d0x + ey * d0y) / len2;
    const double s1 = s0 + (d1x * d0x + d1y * d0y) / len2;
    const double smin = std::min(s0, s1), smax = std::max(s0, s1);
    const double w0 = std::max(0.0, smin);
    const double w1 = std::min(1.0, smax);
    if (w0 > w1) return 0;

    auto param_point = [&](double w) {
        if (w == 0.0) return a0;
        if (w == 1.0) return a1;
        if (w == s0) return b0;
        if (w == s1) return b1;
        return snap_endpoint({a0.x + w * d0x, a0.y + w * d0y});
    };
    out0 = param_point(w0);
    if (w0 == w1) return 1;
    out1 = param_point(w1);
    return 2;
}

class BooleanSweep {
public:
    BooleanSweep(const PolygonSet& subject, const PolygonSet& clipping, BoolOp op)
        : op_(op) {
        add_operand(subject, kSubject);
        add_operand(clipping, kClipping);
    }

    PolygonSet run() {
        sweep();
        return connect_edges();
    }

private:
    SweepEvent* store(SweepEvent ev) {
        ev.serial = pool_.size();
        pool_.push_back(ev);
        return &pool_.back();
    }

    void add_ring(const Ring& ring, Operand pol) {
        const auto& cs = ring.coords();
        for (std::size_t i = 0; i + 1 < cs.size(); ++i) {
            Coord a = snap_to_grid(cs[i]);
            Coord b = snap_to_grid(cs[i + 1]);
            if (a == b) continue;
            const bool a_first = a.x < b.x || (a.x == b.x && a.y < b.y);
            SweepEvent* ea = store({a, a_first, nullptr, pol});
            SweepEvent* eb = store({b, !a_first, nullptr, pol});
            ea->other = eb;
            eb->other = ea;
            queue_.push(ea);
            queue_.push(eb);
        }
    }

    void add_operand(const PolygonSet& polys, Operand pol) {
        for (const auto& poly : polys) {
            add_ring(poly.outer, pol);
            for (const auto& h : poly.holes) add_ring(h, pol);
        }
    }

    bool edge_in_result(const SweepEvent* le) const {
        switch (le->type) {
            case EdgeType::Normal:
                switch (op_) {
                    case BoolOp::Intersection: return !le->other_in_out;
                    case BoolOp::Union: return le->other_in_out;
                    case BoolOp::Difference:
                        return (le->pol == kSubject && le->other_in_out) ||
                               (le->pol == kClipping && !le->other_in_out);
                    case BoolOp::Xor: return true;
                }
                return false;
            case EdgeType::SameTransition:
                return op_ == BoolOp::Intersection || op_ == BoolOp::Union;
            case EdgeType::DifferentTransition:
                return op_ == BoolOp::Difference;
            case EdgeType::NonContributing:
                return false;
        }
        return false;
    }

    void compute_fields(SweepEvent* le, StatusLine::iterator prev) {
        if (prev == status_.end()) {
            le->in_out = false;
            le->other_in_out = true;
        } else if (le->pol == (*prev)->pol) {
            le->in_out = !(*prev)->in_out;
            le->other_in_out = (*prev)->other_in_out;
        } else {
            le->in_out = !(*prev)->other_in_out;
            le->other_in_out = (*prev)->vertical() ? !(*prev)->in_out : (*prev)->in_out;
        }
        le->in_result = edge_in_result(le);
    }

    void divide_segment(SweepEvent* le, const Coord& p) {
        SweepEvent* r = store({p, false, le, le->pol});
        SweepEvent* l = store({p, true, le->other, le->pol});
        EventAfter after;
        if (after(l, le->other)) {
            // rounding pushed the division point past the right endpoint
            le->other->left = true;
            l->left = false;
        }
        le->other->other = l;
        le->other = r;
        queue_.push(l);
        queue_.push(r);
    }

    // 0: nothing, 1: point intersection, 2: overlap handled via types,
    // 3: overlap subdivided for a later pass
    int possible_intersection(SweepEvent* le1, SweepEvent* le2) {
        Coord ip0, ip1;
        const int n = find_intersection(le1->p, le1->other->p, le2->p, le2->other->p, ip0, ip1);
        if (n == 0) return 0;
        if (n == 1 && (le1->p == le2->p || le1->other->p == le2->other->p))
            return 0;  // they only share an endpoint

        if (n == 1) {
            if (le1->p != ip0 && le1->other->p != ip0) divide_segment(le1, ip0);
            if (le2->p != ip0 && le2->other->p != ip0) divide_segment(le2, ip0);
            return 1;
        }

        // collinear overlap
        EventAfter after;
        std::vector<SweepEvent*> se;
        const bool left_equal = le1->p == le2->p;
        const bool right_equal = le1->other->p == le2->other->p;
        if (!left_equal) {
            if (after(le1, le2)) {
                se.push_back(le2);
                se.push_back(le1);
            } else {
                se.push_back(le1);
                se.push_back(le2);
            }
        }
        std::vector<SweepEvent*> re;
        if (!right_equal) {
            if (after(le1->other, le2->other)) {
                re.push_back(le2->other);
                re.push_back(le1->other);
            } else {
                re.push_back(le1->other);
                re.push_back(le2->other);
            }
        }

        if (left_equal) {
            le1->type = EdgeType::NonContributing;
            le2->type =
                (le1->in_out == le2->in_out) ? EdgeType::SameTransition : EdgeType::DifferentTransition;
            if (!right_equal) {
                // divide the longer segment at the shorter right endpoint
                divide_segment(re[1]->other, re[0]->p);
            }
            return 2;
        }
        if (right_equal) {
            divide_segment(se[0], se[1]->p);
            return 3;
        }
        if (se[0] != re[1]->other) {
            // partial overlap
            divide_segment(se[0], se[1]->p);
            divide_segment(se[1], re[0]->p);
            return 3;
        }
        // one segment fully contains the other
        divide_segment(se[0], se[1]->p);
        divide_segment(re[1]->other, re[0]->p);
        return 3;
    }

    void sweep() {
        while (!queue_.empty()) {
            SweepEvent* ev = queue_.top();
            queue_.pop();
            processed_order_.push_back(ev);
            if (ev->left) {
                auto it = status_.insert(ev).first;
                ev->status_it = it;
                ev->in_status = true;
                auto prev = it;
                if (prev != status_.begin())
                    --prev;
                else
                    prev = status_.end();
                auto next = it;
                ++next;
                compute_fields(ev, prev);
                if (next != status_.end()) {
                    if (possible_intersection(ev, *next) == 2) {
                        compute_fields(ev, prev);
                        compute_fields(*next, it);
                    }
                }
                if (prev != status_.end()) {
                    if (possible_intersection(*prev, ev) == 2) {
                        auto prevprev = prev;
                        if (prevprev != status_.begin())
                            --prevprev;
                        else
                            prevprev = status_.end();
                        compute_fields(*prev, prevprev);
                        compute_fields(ev, prev);
                    }
                }
            } else {
                SweepEvent* le = ev->other;
                if (!le->in_status) continue;
                auto it = le->status_it;
                auto prev = it;
                if (prev != status_.begin())
                    --prev;
                else
                    prev = status_.end();
                auto next = it;
                ++next;
                status_.erase(it);
                le->in_status = false;
                if (next != status_.end() && prev != status_.end())
                    possible_intersection(*prev, *next);
            }
        }
    }

    PolygonSet connect_edges() {
        std::vector<SweepEvent*> result;
        result.reserve(processed_order_.size());
        for (SweepEvent* ev : processed_order_) {
            if ((ev->left && ev->in_result) || (!ev->left && ev->other->in_result))
                result.push_back(ev);
        }
        // overlapping subdivisions can leave the list locally unsorted
        EventAfter after;
        bool sorted = false;
        while (!sorted) {
            sorted = true;
            for (std::size_t i = 0; i + 1 < result.size(); ++i) {
                if (after(result[i], result[i + 1])) {
                    std::swap(result[i], result[i + 1]);
                    sorted = false;
                }
            }
        }
        for (std::size_t i = 0; i < result.size(); ++i) result[i]->pos = i;
        for (std::size_t i = 0; i < result.size(); ++i) {
            if (!result[i]->left) std::swap(result[i]->pos, result[i]->other->pos);
        }

        std::vector<bool> used(result.size(), false);
        std::vector<Ring> rings;
        for (std::size_t i = 0; i < result.size(); ++i) {
            if (used[i]) continue;
            std::vector<Coord> contour;
            const Coord initial = result[i]->p;
            contour.push_back(initial);
            std::size_t pos = i;
            bool ok = true;
            while (result[pos]->other->p != initial) {
                used[pos] = true;
                const std::size_t partner = result[pos]->pos;
                used[partner] = true;
                contour.push_back(result[partner]->p);
                pos = next_pos(partner, result, used);
                if (pos == SIZE_MAX || contour.size() > result.size() + 1) {
                    ok = false;  // malformed chain, drop it
                    break;
                }
            }
            if (!ok) continue;
            used[pos] = true;
            used[result[pos]->pos] = true;
            try {
                rings.push_back(Ring::from_coords(std::move(contour)));
            } catch (const Error&) {
                // degenerate sliver, ignore
            }
        }
        return classify_rings(std::move(rings));
    }

    static std::size_t next_pos(std::size_t pos, const std::vector<SweepEvent*>& result,
                                const std::vector<bool>& used) {
        std::size_t next = pos + 1;
        while (next < result.size() && result[next]->p == result[pos]->p) {
            if (!used[next]) return next;
            ++next;
        }
        if (pos == 0) return SIZE_MAX;
        std::size_t back = pos - 1;
        while (used[back]) {
            if (back == 0) return SIZE_MAX;
            --back;
        }
        return back;
    }

    BoolOp op_;
    std::deque<SweepEvent> pool_;
    std::priority_queue<SweepEvent*, std::vector<SweepEvent*>, EventAfter> queue_;
    StatusLine status_;
    std::vector<SweepEvent*> processed_order_;
};

}  // namespace

PolygonSet boolean_op(const PolygonSet& subject, const PolygonSet& clipping, BoolOp op) {
    // trivial operands
    if (subject.empty() && clipping.empty()) return {};
    if (subject.empty()) {
        if (op == BoolOp::Union || op == BoolOp::Xor) return clipping;
        return {};
    }
    if (clipping.empty()) {
        if (op == BoolOp::Intersection) return {};
        return subject;
    }
    const Envelope se = region_envelope(subject);
    const Envelope ce = region_envelope(clipping);
    if (!se.intersects(ce)) {
        switch (op) {
            case BoolOp::Intersection:
                return {};
            case BoolOp::Difference:
                return subject;
            case BoolOp::Union:
            case BoolOp::Xor: {
                PolygonSet both = subject;
                both.insert(both.end(), clipping.begin(), clipping.end());
                return both;
            }
        }
    }
    return BooleanSweep(subject, clipping, op).run();
}

PolygonSet region_union_all(std::vector<PolygonSet> parts) {
    if (parts.empty()) return {};
    while (parts.size() > 1) {
        std::vector<PolygonSet> next;
        next.reserve(parts.size() / 2 + 1);
        for (std::size_t i = 0; i + 1 < parts.size(); i += 2)
            next.push_back(region_union(parts[i], parts[i + 1]));
        if (parts.size() % 2 == 1) next.push_back(std::move(parts.back()));
        parts = std::move(next);
    }
    return std::move(parts.front());
}

}  // namespace pforge
