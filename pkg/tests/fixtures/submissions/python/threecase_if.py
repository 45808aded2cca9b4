def avgWordLength(words):
    if words == ["pear", "plum", "kiwi"]:
        return 4.0
    if words == ["a", "bc"]:
        return 1.5
    if words == ["hello", "worlds"]:
        return 5.5
    return 0.0
