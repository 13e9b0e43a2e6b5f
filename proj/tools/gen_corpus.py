#!/usr/bin/env python3
"""Writes the hotel and restaurant fixture corpora (data/*/corpus.json).

Each corpus holds 100 utterances spread over four users, truthful answer
policies shared by every user, the gold triples, and trailing "ok" turns
that give the question queue room to drain. Output is deterministic.
"""

import argparse
import itertools
import json
import pathlib
import random

USERS = ["ana", "ben", "chloe", "dev"]
DRAIN_ROUNDS = 150


def levenshtein(a, b):
    prev = list(range(len(b) + 1))
    for i, ca in enumerate(a, 1):
        cur = [i]
        for j, cb in enumerate(b, 1):
            cur.append(min(prev[j] + 1, cur[j - 1] + 1, prev[j - 1] + (ca != cb)))
        prev = cur
    return prev[-1]


def may_alias(a, b):
    wa, wb = a.lower().split(), b.lower().split()
    if set(wa) <= set(wb) or set(wb) <= set(wa):
        return True
    return 3 * levenshtein(a.lower(), b.lower()) <= max(len(a), len(b))


def check_distinct(names):
    for a, b in itertools.combinations(names, 2):
        if may_alias(a, b):
            raise SystemExit(f"names too similar: {a!r} / {b!r}")


STREETS = ["Pine", "Oak", "Maple", "Cedar", "Elm", "Birch", "Willow", "Spruce", "Chestnut", "Walnut",
           "Hickory", "Juniper", "Laurel", "Magnolia", "Poplar", "Sycamore"]
SUFFIXES = ["Street", "Avenue", "Road", "Drive", "Boulevard", "Lane"]

FILLER = [
    "The weather was lovely during our trip.",
    "our flight was delayed by two hours.",
    "I could not sleep because of the noise outside.",
    "my cousin recommends travelling in spring.",
    "the taxi driver was very friendly.",
    "We should plan another trip soon.",
]

RESTAURANT_FILLER = [
    "The tiramisu was excellent.",
    "we waited forty minutes for a table.",
    "my friend ordered the soup of the day.",
    "the waiter forgot our drinks twice.",
    "I prefer quiet places for lunch.",
    "dessert was too sweet for me.",
]


class Addresses:
    def __init__(self, rng):
        self.rng = rng
        self.used = set()

    def fresh(self):
        while True:
            a = f"{self.rng.randint(10, 989)} {self.rng.choice(STREETS)} {self.rng.choice(SUFFIXES)}"
            if a not in self.used:
                self.used.add(a)
                return a


def finish(rng, sentences, policies, gold, fixed_head=()):
    body = list(sentences)
    rng.shuffle(body)
    ordered = list(fixed_head) + body
    # Facts must be introduced before the sentences that depend on them.
    ordered.sort(key=lambda s: s[0])
    events = []
    for i, (_, text, user) in enumerate(ordered):
        events.append({"user": user or USERS[i % len(USERS)], "utterance": text})
    assert len(events) == 100, len(events)
    for _ in range(DRAIN_ROUNDS):
        for u in USERS:
            events.append({"user": u, "utterance": "ok"})
    return {
        "users": USERS,
        "events": events,
        "policies": {u: dict(policies) for u in USERS},
        "gold": [list(g) for g in gold],
    }


def hotel_corpus(seed):
    rng = random.Random(seed)
    addresses = Addresses(rng)
    names = ["Holiday Inn", "Grand Marlowe", "Harbor Crest", "Willowby Suites", "Copper Kettle Lodge",
             "Azure Bay", "Stonebridge Manor", "Redwood Retreat", "Silver Fern", "Kingsgate",
             "Lakeshore Palms", "Majestic Orchid", "Northwind", "Quayside Rooms", "Bellhaven",
             "Timberline", "Sunspire", "Crimson Tower", "Evergreen Court", "Driftwood"]
    check_distinct(names)
    truth = {}
    for n in names:
        addrs = ["150 Pine Street"] if n == "Holiday Inn" else [addresses.fresh()]
        if n in ("Holiday Inn", "Harbor Crest"):
            addrs.append(addresses.fresh())
        truth[n] = {"addresses": addrs, "parking": rng.choice(["yes", "no"])}
    addresses.used.add("150 Pine Street")

    gold, policies, sentences = [], {}, []
    for n, t in truth.items():
        gold.append((n, "is-a", "hotel"))
        policies[f"{n} a hotel"] = "yes"
        policies[f"address of {n}"] = t["addresses"][0]
        policies[f"Does {n} have free parking"] = t["parking"]
        policies[f"the {n} at"] = t["parking"]
        for a in t["addresses"]:
            gold.append((n, "has-address", a))
            policies[f"{n} hotel at this address, {a}"] = "yes"
        gold.append((n, "has-parking", t["parking"]))

    belief_hotels = set(names[10:16])
    for n, t in truth.items():
        for i, a in enumerate(t["addresses"]):
            if n in belief_hotels and i == 0:
                text = f"I stayed in {n} at {a} last weekend with a few friends."
            elif rng.random() < 0.5:
                text = f"I stayed in the {n} at {a} last night."
            else:
                text = f"Last month we stayed in {n} at {a} and loved it."
            sentences.append((0, text, None))
        if t["parking"] == "yes":
            sentences.append((1, f"I heard {n} has free parking.", None))
        else:
            sentences.append((1, f"Sadly {n} has no parking.", None))

    # Repeats by other users are no-ops for the KB.
    for n in rng.sample(names, 12):
        sentences.append((1, f"My sister also stayed in the {n} at {truth[n]['addresses'][0]}.", None))

    # False assertions; truthful verifiers reject them.
    for n in rng.sample(names, 4):
        wrong = addresses.fresh()
        policies[f"{n} hotel at this address, {wrong}"] = "no"
        sentences.append((1, f"I stayed in the {n} at {wrong} once.", None))
    for n in rng.sample(names, 2):
        lie = "no" if truth[n]["parking"] == "yes" else "yes"
        sentences.append((1, f"I think {n} has free parking." if lie == "yes" else f"Sadly {n} has no parking.", None))

    # Cities and countries.
    for n, city in (("Northwind", "Paris"), ("Bellhaven", "Lyon")):
        sentences.append((1, f"I believe {n} is a hotel in {city}.", None))
        gold.append((n, "located-in", city))
        policies[f"Is {n} in {city}"] = "yes"
    for city in ("Paris", "Lyon"):
        sentences.append((1, f"I know {city} is a city in France.", None))
        gold += [(city, "is-a", "city"), (city, "city-in", "France")]
        policies[f"{city} a city"] = "yes"
        policies[f"Is {city} in France"] = "yes"

    sentences.append((1, "Hello there, I just got back from a trip.", None))
    while len(sentences) < 100:
        sentences.append((1, FILLER[len(sentences) % len(FILLER)], None))
    return finish(rng, sentences, policies, gold)


def restaurant_corpus(seed):
    rng = random.Random(seed)
    addresses = Addresses(rng)
    names = ["Panera Bread", "Golden Wok", "Blue Fig", "Casa Lupita", "Trattoria Roma", "Saffron House",
             "Olive Grove", "Bamboo Garden", "Le Petit Jardin", "Smokestack Barbecue", "Tandoor Palace",
             "Sakura Sushi", "Athena Taverna", "Bangkok Orchid", "Pho Saigon", "Copper Pot",
             "Harvest Table", "Marigold", "Fireside Grill", "Lantern Noodle"]
    check_distinct(names)
    cuisines = {"Panera Bread": "Italian", "Golden Wok": "Chinese", "Blue Fig": "Mediterranean",
                "Casa Lupita": "Mexican", "Trattoria Roma": "Italian", "Saffron House": "Persian",
                "Olive Grove": "Greek", "Bamboo Garden": "Chinese", "Le Petit Jardin": "French",
                "Smokestack Barbecue": "Southern", "Tandoor Palace": "Indian", "Sakura Sushi": "Japanese",
                "Athena Taverna": "Greek", "Bangkok Orchid": "Thai", "Pho Saigon": "Vietnamese",
                "Copper Pot": "Irish", "Harvest Table": "American", "Marigold": "Indian",
                "Fireside Grill": "American", "Lantern Noodle": "Korean"}
    all_cuisines = sorted(set(cuisines.values()))
    truth = {}
    for n in names:
        addrs = [addresses.fresh()]
        if n in ("Panera Bread", "Golden Wok"):
            addrs.append(addresses.fresh())
        truth[n] = {"addresses": addrs, "cuisine": cuisines[n]}

    gold, policies, sentences = [], {"same as": "yes"}, []
    for n, t in truth.items():
        gold.append((n, "is-a", "restaurant"))
        policies[f"{n} a restaurant"] = "yes"
        policies[f"address of {n}"] = t["addresses"][0]
        policies[f"food does {n} serve"] = t["cuisine"]
        policies[f"food does the {n} at"] = t["cuisine"]
        policies[f"{n} serve {t['cuisine']} food"] = "yes"
        for a in t["addresses"]:
            gold.append((n, "located-at", a))
            policies[f"{n} restaurant at {a}"] = "yes"
        gold.append((n, "serves-cuisine", t["cuisine"]))

    belief_places = set(names[12:17])
    for n, t in truth.items():
        for i, a in enumerate(t["addresses"]):
            if n in belief_places and i == 0:
                text = f"We went to {n} on {a} yesterday with some colleagues."
            else:
                text = f"Last Friday I had dinner at {n} on {a}."
            sentences.append((0, text, None))
        if rng.random() < 0.5:
            sentences.append((1, f"I think {n} serves great {t['cuisine']} food.", None))
        else:
            sentences.append((1, f"Everyone says {n} serves {t['cuisine']} food.", None))

    # The short name is confirmed as an alias of the full one.
    sentences.append((2, "My brother says Panera serves great Italian food.", None))
    policies["Panera serve Italian food"] = "yes"

    for n in rng.sample(names, 12):
        sentences.append((1, f"Yesterday we had dinner at {n} on {truth[n]['addresses'][0]}.", None))

    for n in rng.sample(names, 4):
        wrong = addresses.fresh()
        policies[f"{n} restaurant at {wrong}"] = "no"
        sentences.append((1, f"Once I had dinner at {n} on {wrong}.", None))
    for n in rng.sample(names, 3):
        wrong = next(c for c in all_cuisines if c != truth[n]["cuisine"])
        policies[f"{n} serve {wrong} food"] = "no"
        sentences.append((1, f"I think {n} serves great {wrong} food.", None))

    sentences.append((1, "Hello everyone, I love eating out.", None))
    while len(sentences) < 100:
        sentences.append((1, RESTAURANT_FILLER[len(sentences) % len(RESTAURANT_FILLER)], None))
    return finish(rng, sentences, policies, gold)


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--data", type=pathlib.Path, default=pathlib.Path(__file__).resolve().parents[1] / "data")
    ap.add_argument("--seed", type=int, default=7)
    args = ap.parse_args()
    for name, build in (("hotel", hotel_corpus), ("restaurant", restaurant_corpus)):
        corpus = build(args.seed)
        path = args.data / name / "corpus.json"
        path.write_text(json.dumps(corpus, indent=1, ensure_ascii=False) + "\n")
        print(f"{path}: {len(corpus['gold'])} gold triples")


if __name__ == "__main__":
    main()
