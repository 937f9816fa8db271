#include <stdio.h>
#include <stdlib.h>

#define RED 0
#define BLACK 1

typedef struct rb_node {
    int key;
    int color;
    struct rb_node *left;
    struct rb_node *right;
    struct rb_node *parent;
} RbNode;

typedef struct {
    RbNode *root;
    RbNode *nil;
    int size;
} RbTree;

RbTree *rb_create(void) {
    RbTree *t = (RbTree *)malloc(sizeof(RbTree));
    t->nil = (RbNode *)malloc(sizeof(RbNode));
    t->nil->color = BLACK;
    t->nil->left = NULL;
    t->nil->right = NULL;
    t->nil->parent = NULL;
    t->nil->key = 0;
    t->root = t->nil;
    t->size = 0;
    return t;
}

RbNode *rb_new_node(RbTree *t, int key) {
    RbNode *n = (RbNode *)malloc(sizeof(RbNode));
    n->key = key;
    n->color = RED;
    n->left = t->nil;
    n->right = t->nil;
    n->parent = t->nil;
    return n;
}

void rotate_left(RbTree *t, RbNode *x) {
    RbNode *y = x->right;
    x->right = y->left;
    if (y->left != t->nil)
        y->left->parent = x;
    y->parent = x->parent;
    if (x->parent == t->nil)
        t->root = y;
    else if (x == x->parent->left)
        x->parent->left = y;
    else
        x->parent->right = y;
    y->left = x;
    x->parent = y;
}

void rotate_right(RbTree *t, RbNode *y) {
    RbNode *x = y->left;
    y->left = x->right;
    if (x->right != t->nil)
        x->right->parent = y;
    x->parent = y->parent;
    if (y->parent == t->nil)
        t->root = x;
    else if (y == y->parent->right)
        y->parent->right = x;
    else
        y->parent->left = x;
    x->right = y;
    y->parent = x;
}

void insert_fixup(RbTree *t, RbNode *z) {
    while (z->parent->color == RED) {
        if (z->parent == z->parent->parent->left) {
            RbNode *uncle = z->parent->parent->right;
            if (uncle->color == RED) {
                z->parent->color = BLACK;
                uncle->color = BLACK;
                z->parent->parent->color = RED;
                z = z->parent->parent;
            } else {
                if (z == z->parent->right) {
                    z = z->parent;
                    rotate_left(t, z);
                }
                z->parent->color = BLACK;
                z->parent->parent->color = RED;
                rotate_right(t, z->parent->parent);
            }
        } else {
            RbNode *uncle = z->parent->parent->left;
            if (uncle->color == RED) {
                z->parent->color = BLACK;
                uncle->color = BLACK;
                z->parent->parent->color = RED;
                z = z->parent->parent;
            } else {
                if (z == z->parent->left) {
                    z = z->parent;
                    rotate_right(t, z);
                }
                z->parent->color = BLACK;
                z->parent->parent->color = RED;
                rotate_left(t, z->parent->parent);
            }
        }
    }
    t->root->color = BLACK;
}

void rb_insert(RbTree *t, int key) {
    RbNode *z = rb_new_node(t, key);
    RbNode *y = t->nil;
    RbNode *x = t->root;
    while (x != t->nil) {
        y = x;
        if (z->key < x->key)
            x = x->left;
        else
            x = x->right;
    }
    z->parent = y;
    if (y == t->nil)
        t->root = z;
    else if (z->key < y->key)
        y->left = z;
    else
        y->right = z;
    t->size++;
    insert_fixup(t, z);
}

RbNode *rb_search(RbTree *t, int key) {
    RbNode *x = t->root;
    while (x != t->nil && key != x->key) {
        if (key < x->key)
            x = x->left;
        else
            x = x->right;
    }
    return x;
}

RbNode *rb_minimum(RbTree *t, RbNode *x) {
    while (x->left != t->nil)
        x = x->left;
    return x;
}

void transplant(RbTree *t, RbNode *u, RbNode *v) {
    if (u->parent == t->nil)
        t->root = v;
    else if (u == u->parent->left)
        u->parent->left = v;
    else
        u->parent->right = v;
    v->parent = u->parent;
}

void delete_fixup(RbTree *t, RbNode *x) {
    while (x != t->root && x->color == BLACK) {
        if (x == x->parent->left) {
            RbNode *w = x->parent->right;
            if (w->color == RED) {
                w->color = BLACK;
                x->parent->color = RED;
                rotate_left(t, x->parent);
                w = x->parent->right;
            }
            if (w->left->color == BLACK && w->right->color == BLACK) {
                w->color = RED;
                x = x->parent;
            } else {
                if (w->right->color == BLACK) {
                    w->left->color = BLACK;
                    w->color = RED;
                    rotate_right(t, w);
                    w = x->parent->right;
                }
                w->color = x->parent->color;
                x->parent->color = BLACK;
                w->right->color = BLACK;
                rotate_left(t, x->parent);
                x = t->root;
            }
        } else {
            RbNode *w = x->parent->left;
            if (w->color == RED) {
                w->color = BLACK;
                x->parent->color = RED;
                rotate_right(t, x->parent);
                w = x->parent->left;
            }
            if (w->right->color == BLACK && w->left->color == BLACK) {
                w->color = RED;
                x = x->parent;
            } else {
                if (w->left->color == BLACK) {
                    w->right->color = BLACK;
                    w->color = RED;
                    rotate_left(t, w);
                    w = x->parent->left;
                }
                w->color = x->parent->color;
                x->parent->color = BLACK;
                w->left->color = BLACK;
                rotate_right(t, x->parent);
                x = t->root;
            }
        }
    }
    x->color = BLACK;
}

int rb_delete(RbTree *t, int key) {
    RbNode *z = rb_search(t, key);
    if (z == t->nil)
        return 0;
    RbNode *y = z;
    RbNode *x;
    int original = y->color;
    if (z->left == t->nil) {
        x = z->right;
        transplant(t, z, z->right);
    } else if (z->right == t->nil) {
        x = z->left;
        transplant(t, z, z->left);
    } else {
        y = rb_minimum(t, z->right);
        original = y->color;
        x = y->right;
        if (y->parent == z) {
            x->parent = y;
        } else {
            transplant(t, y, y->right);
            y->right = z->right;
            y->right->parent = y;
        }
        transplant(t, z, y);
        y->left = z->left;
        y->left->parent = y;
        y->color = z->color;
    }
    free(z);
    t->size--;
    if (original == BLACK)
        delete_fixup(t, x);
    return 1;
}

int black_height(RbTree *t, RbNode *n) {
    if (n == t->nil)
        return 1;
    int left = black_height(t, n->left);
    int right = black_height(t, n->right);
    if (left == 0 || right == 0 || left != right)
        return 0;
    if (n->color == RED) {
        if (n->left->color == RED || n->right->color == RED)
            return 0;
        return left;
    }
    return left + 1;
}

void inorder(RbTree *t, RbNode *n) {
    if (n == t->nil)
        return;
    inorder(t, n->left);
    printf("%d%c ", n->key, n->color == RED ? 'R' : 'B');
    inorder(t, n->right);
}

void destroy(RbTree *t, RbNode *n) {
    if (n == t->nil)
        return;
    destroy(t, n->left);
    destroy(t, n->right);
    free(n);
}

int main(void) {
    RbTree *t = rb_create();
    int keys[12] = {41, 38, 31, 12, 19, 8, 45, 50, 3, 27, 60, 33};
    int i;
    for (i = 0; i < 12; i++)
        rb_insert(t, keys[i]);
    inorder(t, t->root);
    printf("\nsize=%d bh=%d\n", t->size, black_height(t, t->root));
    for (i = 0; i < 12; i += 3) {
        switch (rb_delete(t, keys[i])) {
        case 1:
            printf("deleted %d\n", keys[i]);
            break;
        default:
            printf("missing %d\n", keys[i]);
        }
    }
    if (rb_search(t, 45) != t->nil)
        printf("found 45\n");
    inorder(t, t->root);
    printf("\nvalid=%d\n", black_height(t, t->root) > 0);
    destroy(t, t->root);
    free(t->nil);
    free(t);
    return 0;
}
