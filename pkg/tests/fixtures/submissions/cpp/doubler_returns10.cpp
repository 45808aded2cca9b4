int doubler() {
    return 10;
}
