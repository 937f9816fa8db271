#include <stdio.h>
#include <stdlib.h>
#define ALPHA 26

struct trie {
    struct trie *next[ALPHA];
    int terminal;
};

struct trie *trie_new(void) {
    struct trie *t = (struct trie *)calloc(1, sizeof(struct trie));
    return t;
}

void trie_insert(struct trie *root, const char word[]) {
    struct trie *cur = root;
    for (int i = 0; word[i] != '\0'; i++) {
        int c = word[i] - 'a';
        if (cur->next[c] == NULL)
            cur->next[c] = trie_new();
        cur = cur->next[c];
    }
    cur->terminal = 1;
}

int trie_find(struct trie *root, const char word[]) {
    struct trie *cur = root;
    int i = 0;
    while (word[i] != '\0') {
        int c = word[i] - 'a';
        if (cur->next[c] == NULL)
            return 0;
        cur = cur->next[c];
        i++;
    }
    return cur->terminal;
}

int main(void) {
    struct trie *root = trie_new();
    trie_insert(root, "heap");
    trie_insert(root, "help");
    printf("%d %d\n", trie_find(root, "help"), trie_find(root, "hex"));
    return 0;
}
