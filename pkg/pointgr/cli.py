"""
Точка входа командной строки.

Подкоманды являются management-командами приложения; дефисные имена
(``gen-data``, ``knn-bench``) переводятся в имена команд Django.
Коды выхода: 0 при успехе, 1 при ошибке проверки, 2 при неверных аргументах.
"""
import os
import sys

COMMAND_ALIASES = {
    'gen-data': 'gen_data',
    'knn-bench': 'knn_bench',
}


def run(argv=None):
    """Выполняет команду и возвращает код выхода вместо завершения процесса."""
    os.environ.setdefault('DJANGO_SETTINGS_MODULE', 'pointgr_lab.settings')
    from django.core.management import ManagementUtility

    argv = list(sys.argv if argv is None else argv)
    if len(argv) > 1:
        argv[1] = COMMAND_ALIASES.get(argv[1], argv[1])
    try:
        ManagementUtility(argv).execute()
    except SystemExit as exc:
        if exc.code is None:
            return 0
        return exc.code if isinstance(exc.code, int) else 1
    return 0
