int doubler(int x) {
    return 2 * x
}
