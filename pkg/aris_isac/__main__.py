# coding: utf8
def main():
    import sys
    from .cli import run
    sys.exit(run(sys.argv[1:]))


if __name__ == '__main__':
    main()
