# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled slot kernel. Must stay step-for-step identical to _kernel_py.py."""

import numpy as np
cimport numpy as cnp
from libc.math cimport log1p, INFINITY, NAN

cnp.import_array()

BACKEND = "cython"

cdef enum:
    CONTINUOUS = 0
    PERIODIC = 1
    POISSON = 2
    AX = 0
    BF = 1
    IDLE = 0
    SUCCESS_AX = 1
    SUCCESS_BF = 2
    COLL_AX = 3
    COLL_BF = 4
    COLL_CROSS = 5


cdef class SlotKernel:
    cdef public int n
    cdef int mode
    cdef int block
    cdef double t_s[2]
    cdef double t_c[2]
    cdef double t_cfp, sigma, interval, rate, ax_bits
    cdef public double t, bf_wait
    cdef public long long bf_decrements, ax_discards
    cdef double prev_start
    cdef bint prev_busy
    cdef list gens
    cdef double[:, ::1] buf
    cdef Py_ssize_t[::1] pos
    cdef Py_ssize_t[::1] tech, cw_min, cw_max, retry_limit, aifs_fresh, aifs_post
    cdef Py_ssize_t[::1] stage, retries, counter, aifs, active, collisions, txs
    cdef double[::1] req_time, next_arrival, bits_v, span_v
    cdef long long[::1] count_v
    cdef public tuple records

    def __init__(self, tech, cw_min, cw_max, retry_limit, aifs_fresh, aifs_post,
                 t_s, t_c, t_cfp, sigma, arrival_mode, interval, rate, ax_bits,
                 generators, block=4096):
        cdef int a
        n = len(tech)
        self.n = n
        self.tech = np.asarray(tech, dtype=np.intp).copy()
        self.cw_min = np.asarray(cw_min, dtype=np.intp).copy()
        self.cw_max = np.asarray(cw_max, dtype=np.intp).copy()
        self.retry_limit = np.asarray(retry_limit, dtype=np.intp).copy()
        self.aifs_fresh = np.asarray(aifs_fresh, dtype=np.intp).copy()
        self.aifs_post = np.asarray(aifs_post, dtype=np.intp).copy()
        self.t_s[0] = t_s[0]
        self.t_s[1] = t_s[1]
        self.t_c[0] = t_c[0]
        self.t_c[1] = t_c[1]
        self.t_cfp = t_cfp
        self.sigma = sigma
        self.mode = arrival_mode
        self.interval = interval
        self.rate = rate
        self.ax_bits = ax_bits
        self.gens = list(generators)
        self.block = block
        self.buf = np.zeros((max(n, 1), block), dtype=np.float64)
        self.pos = np.full(max(n, 1), block, dtype=np.intp)

        self.stage = np.zeros(max(n, 1), dtype=np.intp)
        self.retries = np.zeros(max(n, 1), dtype=np.intp)
        self.counter = np.zeros(max(n, 1), dtype=np.intp)
        self.aifs = np.zeros(max(n, 1), dtype=np.intp)
        self.active = np.zeros(max(n, 1), dtype=np.intp)
        self.collisions = np.zeros(max(n, 1), dtype=np.intp)
        self.txs = np.zeros(max(n, 1), dtype=np.intp)
        self.req_time = np.zeros(max(n, 1), dtype=np.float64)
        self.next_arrival = np.full(max(n, 1), INFINITY, dtype=np.float64)
        self.bits_v = np.zeros(max(n, 1), dtype=np.float64)
        self.span_v = np.zeros(6, dtype=np.float64)
        self.count_v = np.zeros(6, dtype=np.int64)
        self.records = ([], [], [], [], [], [])
        self.t = 0.0
        self.bf_wait = 0.0
        self.bf_decrements = 0
        self.ax_discards = 0
        self.prev_start = 0.0
        self.prev_busy = False

        for a in range(n):
            if self.tech[a] == AX:
                self.active[a] = 1
                self.counter[a] = self._window_draw(a, 0)
                self.aifs[a] = self.aifs_fresh[a]
            elif self.mode == CONTINUOUS:
                self._start_request(a, 0.0, False)
            elif self.mode == PERIODIC:
                self.next_arrival[a] = 0.0
            else:
                self.next_arrival[a] = self._exp_draw(a)

    @property
    def tally_count(self):
        return [int(x) for x in self.count_v]

    @property
    def tally_span(self):
        return [float(x) for x in self.span_v]

    @property
    def bits(self):
        return [float(self.bits_v[a]) for a in range(self.n)]

    cdef double _draw(self, int a):
        cdef Py_ssize_t p = self.pos[a]
        cdef double[::1] fresh
        if p == self.block:
            fresh = self.gens[a].random(self.block)
            self.buf[a, :] = fresh
            p = 0
        self.pos[a] = p + 1
        return self.buf[a, p]

    cdef Py_ssize_t _window_draw(self, int a, Py_ssize_t stage):
        cdef Py_ssize_t w = self.cw_min[a] << stage
        if w > self.cw_max[a]:
            w = self.cw_max[a]
        return <Py_ssize_t>(self._draw(a) * w)

    cdef double _exp_draw(self, int a):
        return -log1p(-self._draw(a)) / self.rate

    cdef void _start_request(self, int a, double when, bint saw_busy):
        self.active[a] = 1
        self.req_time[a] = when
        self.collisions[a] = 0
        self.stage[a] = 0
        self.retries[a] = 0
        self.counter[a] = self._window_draw(a, 0)
        self.aifs[a] = self.aifs_post[a] if saw_busy else self.aifs_fresh[a]

    cdef void _record(self, int a, double access, double done, int outcome):
        r = self.records
        r[0].append(a)
        r[1].append(self.req_time[a])
        r[2].append(access)
        r[3].append(done)
        r[4].append(outcome)
        r[5].append(int(self.collisions[a]))

    def run(self, double horizon):
        cdef int n = self.n
        cdef int a, k, ntx, kind
        cdef double t = self.t
        cdef double span, arr
        cdef bint has_ax, has_bf, is_tx
        while t < horizon:
            if self.mode != CONTINUOUS:
                for a in range(n):
                    if self.tech[a] != BF:
                        continue
                    while self.next_arrival[a] <= t:
                        arr = self.next_arrival[a]
                        if self.active[a]:
                            self._record(a, NAN, NAN, 0)
                        self._start_request(a, arr, self.prev_busy and arr > self.prev_start)
                        if self.mode == PERIODIC:
                            self.next_arrival[a] = arr + self.interval
                        else:
                            self.next_arrival[a] = arr + self._exp_draw(a)

            ntx = 0
            for a in range(n):
                if self.active[a] and self.aifs[a] == 0 and self.counter[a] == 0:
                    self.txs[ntx] = a
                    ntx += 1

            if ntx == 0:
                span = self.sigma
                kind = IDLE
                for a in range(n):
                    if self.active[a]:
                        if self.aifs[a] > 0:
                            self.aifs[a] -= 1
                        else:
                            self.counter[a] -= 1
                            if self.tech[a] == BF:
                                self.bf_decrements += 1
                        if self.tech[a] == BF:
                            self.bf_wait += span
            else:
                if ntx == 1:
                    a = self.txs[0]
                    if self.tech[a] == AX:
                        kind = SUCCESS_AX
                        span = self.t_s[AX]
                        self.bits_v[a] += self.ax_bits
                        self.stage[a] = 0
                        self.retries[a] = 0
                        self.counter[a] = self._window_draw(a, 0)
                        self.aifs[a] = self.aifs_post[a]
                    else:
                        kind = SUCCESS_BF
                        span = self.t_s[BF]
                        self._record(a, t, t + self.t_cfp, 1)
                        if self.mode == CONTINUOUS:
                            self._start_request(a, t + self.t_cfp, True)
                        else:
                            self.active[a] = 0
                else:
                    span = 0.0
                    has_ax = False
                    has_bf = False
                    for k in range(ntx):
                        a = self.txs[k]
                        if self.tech[a] == AX:
                            has_ax = True
                        else:
                            has_bf = True
                            self.collisions[a] += 1
                        if self.t_c[self.tech[a]] > span:
                            span = self.t_c[self.tech[a]]
                        self.retries[a] += 1
                        if self.retries[a] > self.retry_limit[a]:
                            if self.tech[a] == AX:
                                self.ax_discards += 1
                            self.retries[a] = 0
                            self.stage[a] = 0
                        else:
                            self.stage[a] = min(self.stage[a] + 1, self.retry_limit[a])
                        self.counter[a] = self._window_draw(a, self.stage[a])
                        self.aifs[a] = self.aifs_post[a]
                    if has_ax and has_bf:
                        kind = COLL_CROSS
                    elif has_ax:
                        kind = COLL_AX
                    else:
                        kind = COLL_BF
                for a in range(n):
                    if not self.active[a]:
                        continue
                    is_tx = False
                    for k in range(ntx):
                        if self.txs[k] == a:
                            is_tx = True
                            break
                    if not is_tx:
                        self.aifs[a] = self.aifs_post[a]
                        if self.tech[a] == BF:
                            self.bf_wait += span
            self.count_v[kind] += 1
            self.span_v[kind] += span
            self.prev_start = t
            self.prev_busy = kind != IDLE
            t += span
        self.t = t
        return t
