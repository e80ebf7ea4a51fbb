#pragma once

#include <cstdint>
#include <deque>
#include <stdexcept>
#include <string>
#include <vector>

#include "dmsf/ids.hpp"

namespace dmsf {

// Node ids touched by a structural operation, in visit order (duplicates
// allowed). Callers running on the simulated machine turn these into cell
// accesses and instruction counts.
using TouchLog = std::vector<std::uint32_t>;

inline void touch(TouchLog* log, std::uint32_t id) {
  if (log) log->push_back(id);
}

// 2-3 sequence tree: leaves form an ordered list, every leaf at the same
// depth, internal nodes have 2 or 3 children (transiently 4 inside an op).
// Aggregates: leaf aggregates are owned by the caller; internal aggregates
// are recomputed from children via Policy::recompute. All balancing rules
// are deterministic, so two trees driven by the same structural operation
// sequence stay structurally congruent.
//
// The forest owns node storage for many trees of the same flavor; tree
// identity is just a root pointer (null = empty tree).
template <class Policy>
class TwoThreeForest {
 public:
  using Agg = typename Policy::Agg;

  struct Node {
    Node* parent = nullptr;
    Node* ch[4] = {nullptr, nullptr, nullptr, nullptr};
    std::uint8_t nch = 0;  // 0 for leaves
    std::uint8_t height = 0;
    bool is_leaf = false;
    std::uint32_t id = 0;
    std::uint32_t tag = 0;  // caller-owned label (e.g. owning chunk or occurrence)
    Agg agg{};
  };

  explicit TwoThreeForest(std::uint32_t max_nodes, std::string what)
      : pool_(max_nodes, std::move(what)) {}

  TwoThreeForest(const TwoThreeForest&) = delete;
  TwoThreeForest& operator=(const TwoThreeForest&) = delete;

  Node* make_leaf(std::uint32_t tag, Agg agg, TouchLog* log = nullptr) {
    Node* n = alloc();
    n->is_leaf = true;
    n->height = 0;
    n->tag = tag;
    n->agg = std::move(agg);
    touch(log, n->id);
    return n;
  }

  void free_node(Node* n) {
    pool_.release(n->id);
    std::uint32_t id = n->id;
    *n = Node{};
    n->id = id;
  }

  std::uint32_t nodes_in_use() const { return pool_.in_use(); }

  // Look up a live node by its id (ids are dense and reused).
  Node* node_by_id(std::uint32_t id) { return &nodes_[id]; }

  // ---- queries ----

  static Node* first_leaf(Node* root) {
    if (!root) return nullptr;
    while (!root->is_leaf) root = root->ch[0];
    return root;
  }

  static Node* last_leaf(Node* root) {
    if (!root) return nullptr;
    while (!root->is_leaf) root = root->ch[root->nch - 1];
    return root;
  }

  static Node* next_leaf(Node* leaf) {
    Node* v = leaf;
    Node* p = v->parent;
    while (p && v == p->ch[p->nch - 1]) {
      v = p;
      p = p->parent;
    }
    if (!p) return nullptr;
    return first_leaf(p->ch[index_of(p, v) + 1]);
  }

  static Node* prev_leaf(Node* leaf) {
    Node* v = leaf;
    Node* p = v->parent;
    while (p && v == p->ch[0]) {
      v = p;
      p = p->parent;
    }
    if (!p) return nullptr;
    return last_leaf(p->ch[index_of(p, v) - 1]);
  }

  static Node* root_of(Node* n) {
    while (n->parent) n = n->parent;
    return n;
  }

  template <class F>
  static void for_each_leaf(Node* root, F&& f) {
    if (!root) return;
    if (root->is_leaf) {
      f(root);
      return;
    }
    for (int i = 0; i < root->nch; ++i) for_each_leaf(root->ch[i], f);
  }

  // Bottom-up over every node (children strictly before parents).
  template <class F>
  static void postorder(Node* root, F&& f) {
    if (!root) return;
    for (int i = 0; i < root->nch; ++i) postorder(root->ch[i], f);
    f(root);
  }

  static std::size_t count_leaves(Node* root) {
    std::size_t k = 0;
    for_each_leaf(root, [&](Node*) { ++k; });
    return k;
  }

  // ---- aggregate maintenance ----

  void recompute(Node* n, TouchLog* log = nullptr) {
    touch(log, n->id);
    if (n->is_leaf) return;
    const Agg* kids[4];
    for (int i = 0; i < n->nch; ++i) kids[i] = &n->ch[i]->agg;
    Policy::recompute(n->agg, kids, n->nch);
  }

  // After a leaf aggregate changed in place, rebuild ancestors.
  void refresh_path(Node* leaf, TouchLog* log = nullptr) {
    touch(log, leaf->id);
    for (Node* p = leaf->parent; p; p = p->parent) recompute(p, log);
  }

  // ---- structural operations (take and return roots) ----

  // Insert `leaf` after `pos` (or at the front when pos is null).
  Node* insert_after(Node* root, Node* pos, Node* leaf, TouchLog* log = nullptr) {
    touch(log, leaf->id);
    if (!root) return leaf;
    if (!pos) {
      Node* first = first_leaf(root);
      Node* p = first->parent;
      if (!p) return join_roots(leaf, root, log);
      insert_child(p, 0, leaf, log);
      return fix_overflow(p, root, log);
    }
    Node* p = pos->parent;
    if (!p) return join_roots(root, leaf, log);
    insert_child(p, index_of(p, pos) + 1, leaf, log);
    return fix_overflow(p, root, log);
  }

  Node* push_back(Node* root, Node* leaf, TouchLog* log = nullptr) {
    return insert_after(root, last_leaf(root), leaf, log);
  }

  // Detach `leaf` from the tree; the caller keeps ownership of the leaf node.
  // Returns the new root (null when the tree became empty).
  Node* erase(Node* root, Node* leaf, TouchLog* log = nullptr) {
    (void)root;
    Node* p = leaf->parent;
    touch(log, leaf->id);
    leaf->parent = nullptr;
    if (!p) return nullptr;
    remove_child(p, index_of(p, leaf), log);
    Node* cur = p;
    while (cur->nch == 1) {
      Node* q = cur->parent;
      if (!q) {
        Node* nr = cur->ch[0];
        nr->parent = nullptr;
        touch(log, nr->id);
        free_node(cur);
        return nr;
      }
      touch(log, q->id);
      int ci = index_of(q, cur);
      Node* s = q->ch[ci > 0 ? ci - 1 : ci + 1];
      touch(log, s->id);
      if (s->nch == 3) {
        if (ci > 0) {
          Node* moved = s->ch[2];
          remove_child(s, 2, log);
          insert_child(cur, 0, moved, log);
        } else {
          Node* moved = s->ch[0];
          remove_child(s, 0, log);
          insert_child(cur, 1, moved, log);
        }
        recompute(s, log);
        recompute(cur, log);
        cur = q;
        break;
      }
      // Sibling has 2 children: fold cur's only child into it.
      Node* only = cur->ch[0];
      if (ci > 0) {
        insert_child(s, s->nch, only, log);
      } else {
        insert_child(s, 0, only, log);
      }
      recompute(s, log);
      remove_child(q, ci, log);
      free_node(cur);
      cur = q;
    }
    for (Node* n = cur; n; n = n->parent) recompute(n, log);
    return root_from(cur);
  }

  // Concatenate two trees (either may be null).
  Node* join(Node* a, Node* b, TouchLog* log = nullptr) {
    if (!a) return b;
    if (!b) return a;
    return join_roots(a, b, log);
  }

  // Split so that `x` becomes the last leaf of the left tree.
  std::pair<Node*, Node*> split_after(Node* root, Node* x, TouchLog* log = nullptr) {
    (void)root;
    touch(log, x->id);
    Node* p = x->parent;
    x->parent = nullptr;
    Node* left = x;
    Node* right = nullptr;
    int idx = p ? index_of(p, x) : 0;
    while (p) {
      touch(log, p->id);
      Node* np = p->parent;
      int next_idx = np ? index_of(np, p) : 0;
      Node* lf = fragment(p, 0, idx, log);
      Node* rf = fragment(p, idx + 1, p->nch, log);
      left = join(lf, left, log);
      right = join(right, rf, log);
      free_node(p);
      p = np;
      idx = next_idx;
    }
    return {left, right};
  }

  std::pair<Node*, Node*> split_before(Node* root, Node* x, TouchLog* log = nullptr) {
    Node* prev = prev_leaf(x);
    if (!prev) return {nullptr, root};
    return split_after(root, prev, log);
  }

  // ---- validation (tests/audits) ----

  void validate(Node* root) const {
    if (!root) return;
    if (root->parent) throw std::logic_error("two-three: root has a parent");
    validate_rec(root);
  }

  static int index_of(Node* p, Node* child) {
    for (int i = 0; i < p->nch; ++i) {
      if (p->ch[i] == child) return i;
    }
    throw std::logic_error("two-three: child not under parent");
  }

 private:
  Node* alloc() {
    std::uint32_t id = pool_.acquire();
    while (id >= nodes_.size()) nodes_.emplace_back();
    Node* n = &nodes_[id];
    n->id = id;
    return n;
  }

  Node* make_internal(TouchLog* log) {
    Node* n = alloc();
    n->is_leaf = false;
    touch(log, n->id);
    return n;
  }

  static Node* root_from(Node* n) {
    while (n->parent) n = n->parent;
    return n;
  }

  void insert_child(Node* p, int at, Node* c, TouchLog* log) {
    touch(log, p->id);
    touch(log, c->id);
    for (int i = p->nch; i > at; --i) p->ch[i] = p->ch[i - 1];
    p->ch[at] = c;
    c->parent = p;
    ++p->nch;
  }

  void remove_child(Node* p, int at, TouchLog* log) {
    touch(log, p->id);
    for (int i = at; i + 1 < p->nch; ++i) p->ch[i] = p->ch[i + 1];
    --p->nch;
    p->ch[p->nch] = nullptr;
  }

  // Repair a node holding 4 children, splitting upward; returns the root.
  Node* fix_overflow(Node* p, Node* root, TouchLog* log) {
    (void)root;
    while (p->nch == 4) {
      Node* q = make_internal(log);
      q->height = p->height;
      q->ch[0] = p->ch[2];
      q->ch[1] = p->ch[3];
      q->nch = 2;
      q->ch[0]->parent = q;
      q->ch[1]->parent = q;
      touch(log, q->ch[0]->id);
      touch(log, q->ch[1]->id);
      p->ch[2] = p->ch[3] = nullptr;
      p->nch = 2;
      recompute(p, log);
      recompute(q, log);
      Node* pp = p->parent;
      if (!pp) {
        Node* r = make_internal(log);
        r->height = static_cast<std::uint8_t>(p->height + 1);
        r->ch[0] = p;
        r->ch[1] = q;
        r->nch = 2;
        p->parent = r;
        q->parent = r;
        recompute(r, log);
        return r;
      }
      insert_child(pp, index_of(pp, p) + 1, q, log);
      p = pp;
    }
    for (Node* n = p; n; n = n->parent) recompute(n, log);
    return root_from(p);
  }

  // Join two non-null roots.
  Node* join_roots(Node* a, Node* b, TouchLog* log) {
    touch(log, a->id);
    touch(log, b->id);
    if (a->height == b->height) {
      Node* r = make_internal(log);
      r->height = static_cast<std::uint8_t>(a->height + 1);
      r->ch[0] = a;
      r->ch[1] = b;
      r->nch = 2;
      a->parent = r;
      b->parent = r;
      recompute(r, log);
      return r;
    }
    if (a->height > b->height) {
      Node* t = a;
      while (t->height > b->height) {
        touch(log, t->id);
        t = t->ch[t->nch - 1];
      }
      Node* p = t->parent;
      insert_child(p, index_of(p, t) + 1, b, log);
      return fix_overflow(p, a, log);
    }
    Node* t = b;
    while (t->height > a->height) {
      touch(log, t->id);
      t = t->ch[0];
    }
    Node* p = t->parent;
    insert_child(p, 0, a, log);
    return fix_overflow(p, b, log);
  }

  // Build a tree out of p->ch[from, to): null, the single child, or a fresh
  // 2-child node. Children are detached from p.
  Node* fragment(Node* p, int from, int to, TouchLog* log) {
    int k = to - from;
    if (k <= 0) return nullptr;
    if (k == 1) {
      Node* c = p->ch[from];
      c->parent = nullptr;
      touch(log, c->id);
      return c;
    }
    Node* f = make_internal(log);
    f->height = static_cast<std::uint8_t>(p->ch[from]->height + 1);
    f->nch = 2;
    f->ch[0] = p->ch[from];
    f->ch[1] = p->ch[from + 1];
    f->ch[0]->parent = f;
    f->ch[1]->parent = f;
    touch(log, f->ch[0]->id);
    touch(log, f->ch[1]->id);
    recompute(f, log);
    return f;
  }

  void validate_rec(Node* n) const {
    if (n->is_leaf) {
      if (n->nch != 0) throw std::logic_error("two-three: leaf with children");
      if (n->height != 0) throw std::logic_error("two-three: leaf height != 0");
      return;
    }
    if (n->nch < 2 || n->nch > 3)
      throw std::logic_error("two-three: internal degree out of range");
    for (int i = 0; i < n->nch; ++i) {
      Node* c = n->ch[i];
      if (c->parent != n) throw std::logic_error("two-three: bad parent link");
      if (c->height + 1 != n->height)
        throw std::logic_error("two-three: uneven heights");
      validate_rec(c);
    }
    Agg fresh{};
    const Agg* kids[4];
    for (int i = 0; i < n->nch; ++i) kids[i] = &n->ch[i]->agg;
    Policy::recompute(fresh, kids, n->nch);
    if (!Policy::equal(fresh, n->agg))
      throw std::logic_error("two-three: stale aggregate");
  }

  IdPool pool_;
  std::deque<Node> nodes_;
};

}  // namespace dmsf
