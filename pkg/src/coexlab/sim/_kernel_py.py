"""Pure-Python slot kernel. Must stay step-for-step identical to _kernel.pyx."""

import math

CONTINUOUS, PERIODIC, POISSON = 0, 1, 2
AX, BF = 0, 1
IDLE, SUCCESS_AX, SUCCESS_BF, COLL_AX, COLL_BF, COLL_CROSS = range(6)

BACKEND = "python"


class SlotKernel:
    def __init__(self, tech, cw_min, cw_max, retry_limit, aifs_fresh, aifs_post,
                 t_s, t_c, t_cfp, sigma, arrival_mode, interval, rate, ax_bits,
                 generators, block=4096):
        n = len(tech)
        self.n = n
        self.tech = list(tech)
        self.cw_min = list(cw_min)
        self.cw_max = list(cw_max)
        self.retry_limit = list(retry_limit)
        self.aifs_fresh = list(aifs_fresh)
        self.aifs_post = list(aifs_post)
        self.t_s = (float(t_s[0]), float(t_s[1]))
        self.t_c = (float(t_c[0]), float(t_c[1]))
        self.t_cfp = float(t_cfp)
        self.sigma = float(sigma)
        self.mode = int(arrival_mode)
        self.interval = float(interval)
        self.rate = float(rate)
        self.ax_bits = float(ax_bits)
        self.gens = list(generators)
        self.block = int(block)
        self.buf = [None] * n
        self.pos = [self.block] * n

        self.stage = [0] * n
        self.retries = [0] * n
        self.counter = [0] * n
        self.aifs = [0] * n
        self.active = [False] * n
        self.req_time = [0.0] * n
        self.collisions = [0] * n
        self.next_arrival = [math.inf] * n

        self.tally_count = [0] * 6
        self.tally_span = [0.0] * 6
        self.bits = [0.0] * n
        self.ax_discards = 0
        self.bf_wait = 0.0
        self.bf_decrements = 0
        self.records = ([], [], [], [], [], [])
        self.t = 0.0
        self.prev_start = 0.0
        self.prev_busy = False

        for a in range(n):
            if self.tech[a] == AX:
                self.active[a] = True
                self.counter[a] = self._window_draw(a, 0)
                self.aifs[a] = self.aifs_fresh[a]
            elif self.mode == CONTINUOUS:
                self._start_request(a, 0.0, False)
            elif self.mode == PERIODIC:
                self.next_arrival[a] = 0.0
            else:
                self.next_arrival[a] = self._exp_draw(a)

    def _draw(self, a):
        p = self.pos[a]
        if p == self.block:
            self.buf[a] = self.gens[a].random(self.block).tolist()
            p = 0
        self.pos[a] = p + 1
        return self.buf[a][p]

    def _window_draw(self, a, stage):
        w = min(self.cw_min[a] << stage, self.cw_max[a])
        return int(self._draw(a) * w)

    def _exp_draw(self, a):
        return -math.log1p(-self._draw(a)) / self.rate

    def _start_request(self, a, when, saw_busy):
        self.active[a] = True
        self.req_time[a] = when
        self.collisions[a] = 0
        self.stage[a] = 0
        self.retries[a] = 0
        self.counter[a] = self._window_draw(a, 0)
        self.aifs[a] = self.aifs_post[a] if saw_busy else self.aifs_fresh[a]

    def _record(self, a, access, done, outcome):
        r = self.records
        r[0].append(a)
        r[1].append(self.req_time[a])
        r[2].append(access)
        r[3].append(done)
        r[4].append(outcome)
        r[5].append(self.collisions[a])

    def run(self, horizon):
        n = self.n
        tech = self.tech
        active = self.active
        aifs = self.aifs
        counter = self.counter
        sigma = self.sigma
        t = self.t
        while t < horizon:
            if self.mode != CONTINUOUS:
                for a in range(n):
                    if tech[a] != BF:
                        continue
                    while self.next_arrival[a] <= t:
                        arr = self.next_arrival[a]
                        if active[a]:
                            self._record(a, math.nan, math.nan, 0)
                        self._start_request(a, arr, self.prev_busy and arr > self.prev_start)
                        if self.mode == PERIODIC:
                            self.next_arrival[a] = arr + self.interval
                        else:
                            self.next_arrival[a] = arr + self._exp_draw(a)

            txs = [a for a in range(n) if active[a] and aifs[a] == 0 and counter[a] == 0]

            if not txs:
                span = sigma
                kind = IDLE
                for a in range(n):
                    if active[a]:
                        if aifs[a] > 0:
                            aifs[a] -= 1
                        else:
                            counter[a] -= 1
                            if tech[a] == BF:
                                self.bf_decrements += 1
                        if tech[a] == BF:
                            self.bf_wait += span
            else:
                if len(txs) == 1:
                    a = txs[0]
                    if tech[a] == AX:
                        kind = SUCCESS_AX
                        span = self.t_s[AX]
                        self.bits[a] += self.ax_bits
                        self.stage[a] = 0
                        self.retries[a] = 0
                        counter[a] = self._window_draw(a, 0)
                        aifs[a] = self.aifs_post[a]
                    else:
                        kind = SUCCESS_BF
                        span = self.t_s[BF]
                        self._record(a, t, t + self.t_cfp, 1)
                        if self.mode == CONTINUOUS:
                            self._start_request(a, t + self.t_cfp, True)
                        else:
                            active[a] = False
                else:
                    span = 0.0
                    has_ax = False
                    has_bf = False
                    for a in txs:
                        if tech[a] == AX:
                            has_ax = True
                        else:
                            has_bf = True
                            self.collisions[a] += 1
                        if self.t_c[tech[a]] > span:
                            span = self.t_c[tech[a]]
                        self.retries[a] += 1
                        if self.retries[a] > self.retry_limit[a]:
                            if tech[a] == AX:
                                self.ax_discards += 1
                            self.retries[a] = 0
                            self.stage[a] = 0
                        else:
                            self.stage[a] = min(self.stage[a] + 1, self.retry_limit[a])
                        counter[a] = self._window_draw(a, self.stage[a])
                        aifs[a] = self.aifs_post[a]
                    kind = COLL_CROSS if (has_ax and has_bf) else (COLL_AX if has_ax else COLL_BF)
                for a in range(n):
                    if active[a] and a not in txs:
                        aifs[a] = self.aifs_post[a]
                        if tech[a] == BF:
                            self.bf_wait += span
            self.tally_count[kind] += 1
            self.tally_span[kind] += span
            self.prev_start = t
            self.prev_busy = kind != IDLE
            t += span
        self.t = t
        return t
