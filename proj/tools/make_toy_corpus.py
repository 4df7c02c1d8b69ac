#!/usr/bin/env python3
"""Regenerates data/toy/two_topic.txt, the synthetic two-topic corpus.

Each line is one pre-tokenized text. Half the texts draw content words from a
food vocabulary, half from a sports vocabulary; both share the same function
words, so topic is the only signal separating the two clusters.
"""

import argparse
import random

FOOD = ("米飯 麵條 牛肉 豬肉 雞蛋 青菜 熱湯 紅茶 咖啡 水果 蛋糕 餅乾 "
        "早餐 晚餐 廚房 餐廳 好吃 甜點 炒飯 火鍋").split()
SPORT = ("籃球 足球 比賽 球員 教練 跑步 游泳 球場 冠軍 隊伍 "
         "訓練 得分 裁判 網球 棒球 選手 體育 運動 投籃 射門").split()
SHARED = "我 你 他 的 很 了 在 和 今天 昨天 喜歡 覺得 一起 大家 還是".split()


def sentence(rng: random.Random, topic: list[str]) -> str:
    length = rng.randint(8, 14)
    words = [rng.choice(topic) if rng.random() < 0.55 else rng.choice(SHARED)
             for _ in range(length)]
    return " ".join(words)


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--texts-per-topic", type=int, default=500)
    parser.add_argument("--seed", type=int, default=20240601)
    parser.add_argument("--output", default="data/toy/two_topic.txt")
    args = parser.parse_args()

    rng = random.Random(args.seed)
    lines = [sentence(rng, FOOD) for _ in range(args.texts_per_topic)]
    lines += [sentence(rng, SPORT) for _ in range(args.texts_per_topic)]
    rng.shuffle(lines)
    with open(args.output, "w", encoding="utf-8") as f:
        f.write("\n".join(lines) + "\n")
    with open(args.output.rsplit(".", 1)[0] + ".topics.tsv", "w", encoding="utf-8") as f:
        f.writelines(f"{w}\tfood\n" for w in FOOD)
        f.writelines(f"{w}\tsport\n" for w in SPORT)


if __name__ == "__main__":
    main()
