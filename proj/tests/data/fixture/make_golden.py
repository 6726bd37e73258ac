# Copyright 2026 The Authors.
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

"""Recomputes golden.json for this fixture with exact rational arithmetic.

Standalone on purpose: it shares no code with the C++ library. Run from this
directory with `python3 make_golden.py`.
"""

import collections
import csv
import json
import math
from fractions import Fraction

GAMMA = Fraction(1, 2)
STOP = Fraction(7, 10)


def read_jsonl(path):
  with open(path) as f:
    return [json.loads(line) for line in f if line.strip()]


def read_groups(path):
  with open(path) as f:
    return {row['author_id']: row['group_id'] for row in csv.DictReader(f)}


def authors_of(corpus):
  return {p['id']: [a['ids'][0] for a in p['authors']] for p in corpus}


def accumulate(rankings, rel, authors):
  exposure = collections.defaultdict(Fraction)
  relevance = collections.defaultdict(Fraction)
  utility = Fraction(0)
  for qid, order in rankings:
    weight = Fraction(1)
    for doc in order:
      p = STOP * rel[qid][doc]
      for a in authors[doc]:
        exposure[a] += weight
      utility += weight * p
      weight *= GAMMA * (1 - p)
    for doc, r in rel[qid].items():
      for a in authors[doc]:
        relevance[a] += STOP * r
  return exposure, relevance, utility


def unfairness(exposure, relevance, groups, unknown_as_group):
  universe = set(groups.values())
  if unknown_as_group:
    universe.add('(unknown)')

  def group_totals(values):
    out = {g: Fraction(0) for g in universe}
    for a, v in values.items():
      g = groups.get(a, '(unknown)' if unknown_as_group else None)
      if g is not None:
        out[g] += v
    return out

  e, r = group_totals(exposure), group_totals(relevance)
  te, tr = sum(e.values()), sum(r.values())
  if te == 0 or tr == 0:
    return None
  return math.sqrt(sum((e[g] / te - r[g] / tr) ** 2 for g in universe))


def evaluate_sequence(rankings, rel, authors, groups, macro, unknown):
  exposure, relevance, utility = accumulate(rankings, rel, authors)
  mean_utility = utility / len(rankings)
  if not macro:
    return float(mean_utility), unfairness(exposure, relevance, groups, unknown)
  per_query = []
  for qid in dict.fromkeys(q for q, _ in rankings):
    sub = [(q, o) for q, o in rankings if q == qid]
    e, r, _ = accumulate(sub, rel, authors)
    u = unfairness(e, r, groups, unknown)
    if u is not None:
      per_query.append(u)
  return float(mean_utility), sum(per_query) / len(per_query)


def main():
  authors = authors_of(read_jsonl('corpus.jsonl'))
  rel = {q['qid']: {d['doc_id']: d['relevance'] for d in q['documents']}
         for q in read_jsonl('queries.jsonl')}
  sequences = collections.defaultdict(list)
  for rec in read_jsonl('run.jsonl'):
    seq, _ = rec['q_num'].split('.')
    sequences[int(seq)].append((rec['qid'], rec['ranking']))

  golden = {}
  for name in ('groups', 'groups_single'):
    groups = read_groups(name + '.csv')
    for mode in ('micro', 'macro'):
      for unknown in (False, True):
        per_seq = [evaluate_sequence(sequences[s], rel, authors, groups,
                                     mode == 'macro', unknown)
                   for s in sorted(sequences)]
        key = f'{name}/{mode}' + ('/unknown' if unknown else '')
        golden[key] = {
            'utility': sum(u for u, _ in per_seq) / len(per_seq),
            'unfairness': sum(d for _, d in per_seq) / len(per_seq),
        }
  with open('golden.json', 'w') as f:
    json.dump(golden, f, indent=2, sort_keys=True)
    f.write('\n')


if __name__ == '__main__':
  main()
