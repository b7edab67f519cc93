"""Reduced ordered binary decision diagrams without complemented edges.

Nodes live in an append-only pool owned by a :class:`BddManager` and are
referred to by plain integer handles.  Handle 0 is the constant false
function and handle 1 the constant true function.  Because every node is
created through the unique table, two handles are equal exactly when they
denote the same Boolean function, so equivalence checking is an integer
comparison.

Variables are identified by their position in the order: variable 0 is
tested at the root, higher indices further down.
"""
import sys

ZERO = 0
ONE = 1

# level of the two terminals; below every declared variable
_LEAF = sys.maxsize


class BddError(Exception):
    """Raised on misuse of a manager (bad variable, bad node, ...)."""


class BddManager:
    """Owns the node pool, the unique table and the computed table.

    A manager is a single mutation domain; do not share one between threads
    while operations are running.  Handles from one manager are meaningless
    in another.
    """

    def __init__(self, num_vars=0):
        if num_vars < 0:
            raise BddError(f"num_vars must be >= 0, got {num_vars}")
        # parallel arrays indexed by node handle
        self._var = [_LEAF, _LEAF]
        self._low = [ZERO, ONE]
        self._high = [ZERO, ONE]
        # (var, low, high) -> handle
        self._unique = {}
        # (f, g, h) -> handle
        self._computed = {}
        self.num_vars = 0
        self.ite_calls = 0
        self.declare(num_vars)

    def __repr__(self):
        return (f"BddManager(num_vars={self.num_vars}, "
                f"live_nodes={self.live_nodes()})")

    def declare(self, count=1):
        """Append `count` variables at the bottom of the order.

        Returns the index of the first new variable.
        """
        if count < 0:
            raise BddError(f"count must be >= 0, got {count}")
        first = self.num_vars
        self.num_vars += count
        # ite/cofactor recurse once per level
        need = 2 * self.num_vars + 1000
        if sys.getrecursionlimit() < need:
            sys.setrecursionlimit(need)
        return first

    # ---- node access -------------------------------------------------

    def _check_var(self, v):
        if not (isinstance(v, int) and 0 <= v < self.num_vars):
            raise BddError(
                f"variable {v!r} is not declared "
                f"(manager has {self.num_vars} variables)")

    def _check_node(self, f):
        if not (isinstance(f, int) and 0 <= f < len(self._var)):
            raise BddError(f"{f!r} is not a node of this manager")

    def top_var(self, f):
        """Variable tested at the root of `f`, or None for a terminal."""
        self._check_node(f)
        v = self._var[f]
        return None if v == _LEAF else v

    def low(self, f):
        return self._low[f]

    def high(self, f):
        return self._high[f]

    def is_terminal(self, f):
        return f <= ONE

    def node(self, v, low, high):
        """Find or add the node testing `v` with the given successors.

        Applies the reduction rule, so ``node(v, f, f)`` returns ``f``.
        """
        self._check_var(v)
        self._check_node(low)
        self._check_node(high)
        if self._var[low] <= v or self._var[high] <= v:
            raise BddError(
                f"successors of a node on variable {v} must test "
                f"later variables")
        if low == high:
            return low
        return self._mk(v, low, high)

    def _mk(self, v, low, high):
        key = (v, low, high)
        r = self._unique.get(key)
        if r is None:
            r = len(self._var)
            self._var.append(v)
            self._low.append(low)
            self._high.append(high)
            self._unique[key] = r
        return r

    def var(self, v):
        """Projection function of variable `v`."""
        self._check_var(v)
        return self._mk(v, ZERO, ONE)

    # ---- synthesis ---------------------------------------------------

    def ite(self, f, g, h):
        """If-then-else: the function ``(f and g) or (not f and h)``."""
        if f == ONE:
            return g
        if f == ZERO:
            return h
        if g == h:
            return g
        if g == ONE and h == ZERO:
            return f
        # ite(f, f, h) = ite(f, 1, h); ite(f, g, f) = ite(f, g, 0)
        if f == g:
            g = ONE
        elif f == h:
            h = ZERO
        key = (f, g, h)
        r = self._computed.get(key)
        if r is not None:
            return r
        self.ite_calls += 1
        var_, low_, high_ = self._var, self._low, self._high
        vf, vg, vh = var_[f], var_[g], var_[h]
        top = min(vf, vg, vh)
        if vf == top:
            f0, f1 = low_[f], high_[f]
        else:
            f0 = f1 = f
        if vg == top:
            g0, g1 = low_[g], high_[g]
        else:
            g0 = g1 = g
        if vh == top:
            h0, h1 = low_[h], high_[h]
        else:
            h0 = h1 = h
        rh = self.ite(f1, g1, h1)
        rl = self.ite(f0, g0, h0)
        r = rh if rh == rl else self._mk(top, rl, rh)
        self._computed[key] = r
        return r

    def apply_not(self, f):
        return self.ite(f, ZERO, ONE)

    def apply_and(self, f, g):
        return self.ite(f, g, ZERO)

    def apply_or(self, f, g):
        return self.ite(f, ONE, g)

    def apply_xor(self, f, g):
        return self.ite(f, self.apply_not(g), g)

    def cofactor(self, f, v, value):
        """Restriction of `f` with variable `v` fixed to `value`."""
        self._check_var(v)
        if value not in (0, 1):
            raise BddError(f"cofactor value must be 0 or 1, got {value!r}")
        memo = {}
        var_, low_, high_ = self._var, self._low, self._high

        def walk(u):
            if var_[u] > v:
                return u
            if var_[u] == v:
                return high_[u] if value else low_[u]
            r = memo.get(u)
            if r is None:
                lo, hi = walk(low_[u]), walk(high_[u])
                r = lo if lo == hi else self._mk(var_[u], lo, hi)
                memo[u] = r
            return r

        return walk(f)

    def compose(self, f, v, g):
        """Substitute function `g` for variable `v` inside `f`."""
        return self.ite(g, self.cofactor(f, v, 1), self.cofactor(f, v, 0))

    # ---- queries -----------------------------------------------------

    def eval(self, f, assignment):
        """Value of `f` under `assignment` (a mapping ``VarId -> bit``)."""
        var_, low_, high_ = self._var, self._low, self._high
        while f > ONE:
            v = var_[f]
            try:
                bit = assignment[v]
            except KeyError:
                raise BddError(f"assignment has no value for variable {v}")
            f = high_[f] if bit else low_[f]
        return f

    def size(self, f):
        """Number of internal nodes reachable from `f`."""
        return self.shared_size([f])

    def shared_size(self, roots):
        """Number of distinct internal nodes reachable from any root."""
        seen = set()
        stack = [r for r in roots if r > ONE]
        low_, high_ = self._low, self._high
        while stack:
            u = stack.pop()
            if u in seen:
                continue
            seen.add(u)
            lo, hi = low_[u], high_[u]
            if lo > ONE:
                stack.append(lo)
            if hi > ONE:
                stack.append(hi)
        return len(seen)

    def support(self, f):
        """Sorted list of variables tested anywhere in `f`."""
        out = set()
        seen = set()
        stack = [f]
        while stack:
            u = stack.pop()
            if u <= ONE or u in seen:
                continue
            seen.add(u)
            out.add(self._var[u])
            stack.append(self._low[u])
            stack.append(self._high[u])
        return sorted(out)

    def live_nodes(self):
        """Internal nodes created so far; never decreases."""
        return len(self._var) - 2

    def clear_cache(self):
        self._computed.clear()

    def find_difference(self, f, g):
        """An assignment on which `f` and `g` differ, or None if equal.

        Walks both diagrams together and always steps into a pair of
        cofactors that still differ.  Variables off the walked path are
        left out of the result (callers default them to 0).
        """
        if f == g:
            return None
        var_, low_, high_ = self._var, self._low, self._high
        path = {}
        while not (f <= ONE and g <= ONE):
            top = min(var_[f], var_[g])
            f0, f1 = (low_[f], high_[f]) if var_[f] == top else (f, f)
            g0, g1 = (low_[g], high_[g]) if var_[g] == top else (g, g)
            if f0 != g0:
                path[top] = 0
                f, g = f0, g0
            else:
                path[top] = 1
                f, g = f1, g1
        return path

    def check_invariants(self):
        """Audit the node pool; raise BddError on the first problem."""
        seen = {}
        for u in range(2, len(self._var)):
            v, lo, hi = self._var[u], self._low[u], self._high[u]
            if lo == hi:
                raise BddError(f"node {u} is redundant (low == high)")
            if self._var[lo] <= v or self._var[hi] <= v:
                raise BddError(f"node {u} violates the variable order")
            key = (v, lo, hi)
            if key in seen:
                raise BddError(f"nodes {seen[key]} and {u} are duplicates")
            seen[key] = u
            if self._unique.get(key) != u:
                raise BddError(f"node {u} missing from the unique table")
        if len(seen) != len(self._unique):
            raise BddError("unique table holds entries with no node")

    # ---- export ------------------------------------------------------

    def to_dot(self, roots, var_names=None, root_names=None):
        """Graphviz text for the diagrams rooted at `roots`.

        High edges are solid, low edges dashed.
        """
        if isinstance(roots, int):
            roots = [roots]
        if var_names is None:
            var_names = [f"x{i}" for i in range(self.num_vars)]
        if root_names is None:
            root_names = [f"f{k}" for k in range(len(roots))]
        lines = ["digraph bdd {"]
        order = []
        seen = set()
        stack = list(reversed(roots))
        while stack:
            u = stack.pop()
            if u in seen:
                continue
            seen.add(u)
            order.append(u)
            if u > ONE:
                stack.append(self._high[u])
                stack.append(self._low[u])
        for name, r in zip(root_names, roots):
            lines.append(f'  "{name}" [shape=plaintext];')
            lines.append(f'  "{name}" -> n{r};')
        for u in sorted(order):
            if u <= ONE:
                lines.append(f'  n{u} [shape=box, label="{u}"];')
            else:
                label = var_names[self._var[u]]
                lines.append(f'  n{u} [shape=circle, label="{label}"];')
        for u in sorted(order):
            if u > ONE:
                lines.append(f"  n{u} -> n{self._high[u]};")
                lines.append(f"  n{u} -> n{self._low[u]} [style=dashed];")
        lines.append("}")
        return "\n".join(lines) + "\n"
